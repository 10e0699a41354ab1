#pragma once

#include <stdexcept>
#include <string>

namespace imt {

// Base of every failure the toolkit reports. code() is a stable identifier
// that the CLI writes into its machine-readable error record.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define IMT_DEFINE_ERROR(Name, Code)                                        \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(Code, what) {}       \
    }

IMT_DEFINE_ERROR(ValidationError, "validation");
IMT_DEFINE_ERROR(RegimeError, "regime");
IMT_DEFINE_ERROR(SingularMassError, "singular_mass");
IMT_DEFINE_ERROR(DomainError, "domain");
IMT_DEFINE_ERROR(NonNormalizableError, "non_normalizable");
IMT_DEFINE_ERROR(NoThresholdError, "no_threshold");
IMT_DEFINE_ERROR(NonConvergenceError, "non_convergence");
IMT_DEFINE_ERROR(NumericalError, "numerical");
IMT_DEFINE_ERROR(StabilityError, "stability");
IMT_DEFINE_ERROR(ZeroNormError, "zero_norm");
IMT_DEFINE_ERROR(MultimodalProfileError, "multimodal_profile");
IMT_DEFINE_ERROR(DegenerateSeriesError, "degenerate_series");
IMT_DEFINE_ERROR(SchemaMismatchError, "schema_mismatch");
IMT_DEFINE_ERROR(ConfigError, "config");
IMT_DEFINE_ERROR(IoError, "io");

#undef IMT_DEFINE_ERROR

}  // namespace imt
