#include "imt/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "imt/error.hpp"

namespace imt {

static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little-endian");

std::string format_number(double v) { return fmt::format("{:.12g}", v); }

void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "# schema: " << t.schema << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const RVec& r : t.rows) {
        if (r.size() != t.columns.size()) throw IoError("row width differs from header in " + path);
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# schema: ", 0) != 0)
        throw SchemaMismatchError(path + " lacks a schema line");
    t.schema = line.substr(10);
    if (!std::getline(in, line)) throw SchemaMismatchError(path + " lacks a header");
    std::stringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) t.columns.push_back(c);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RVec r;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) {
            try {
                r.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw IoError("bad number '" + c + "' in " + path);
            }
        }
        if (r.size() != t.columns.size()) throw IoError("ragged row in " + path);
        t.rows.push_back(std::move(r));
    }
    return t;
}

RVec column(const CsvTable& t, const std::string& name) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        if (t.columns[c] == name) {
            RVec v;
            for (const RVec& r : t.rows) v.push_back(r[c]);
            return v;
        }
    throw SchemaMismatchError("column '" + name + "' missing from " + t.schema);
}

namespace {

template <class T>
void put(std::ofstream& o, T v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("truncated snapshot");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const ComplexField2D& f, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out.write("IMTS", 4);
    put<std::uint32_t>(out, 1);
    put<std::uint64_t>(out, f.nz());
    put<std::uint64_t>(out, f.ny());
    put<double>(out, f.grid().dz());
    put<double>(out, f.grid().dy());
    put<double>(out, t);
    out.write(reinterpret_cast<const char*>(f.data().data()),
              static_cast<std::streamsize>(f.data().size() * sizeof(cplx)));
    if (!out) throw IoError("write failed for " + path);
}

ComplexField2D read_snapshot(const std::string& path, double* t) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "IMTS", 4) != 0) throw SchemaMismatchError(path + " is not a snapshot");
    if (get<std::uint32_t>(in) != 1) throw SchemaMismatchError("unsupported snapshot version");
    const auto nz = get<std::uint64_t>(in);
    const auto ny = get<std::uint64_t>(in);
    const double dz = get<double>(in);
    const double dy = get<double>(in);
    const double tt = get<double>(in);
    if (t) *t = tt;
    Grid2D g(static_cast<int>(nz), static_cast<int>(ny), 0.5 * dz * nz, 0.5 * dy * ny);
    ComplexField2D f(g);
    in.read(reinterpret_cast<char*>(f.data().data()),
            static_cast<std::streamsize>(f.data().size() * sizeof(cplx)));
    if (!in) throw IoError("truncated snapshot payload");
    return f;
}

}  // namespace imt
