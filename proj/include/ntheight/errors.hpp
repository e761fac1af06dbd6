#pragma once

#include <stdexcept>
#include <string>

namespace ntheight {

// Error taxonomy shared by the whole library.  Every failure mode that a
// caller can reasonably branch on gets its own code; the CLI maps these to
// process exit codes (config -> 2, precision -> 3, caps/budgets -> 4).
enum class errc {
    not_monic,
    reducible_polynomial,
    precision_exhausted,
    zero_element,
    equal_inputs,
    no_simple_root,
    index_prime,
    bad_prime,
    search_exhausted,
    cap_exceeded,
    infinity_point,
    coordinate_blowup,
    insufficient_primes,
    dimension_error,
    no_kernel,
    identically_zero_on_image,
    infeasible,
    all_zero,
    config_error,
    invalid_argument,
    internal_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::not_monic: return "NotMonic";
        case errc::reducible_polynomial: return "ReduciblePolynomial";
        case errc::precision_exhausted: return "PrecisionExhausted";
        case errc::zero_element: return "ZeroElement";
        case errc::equal_inputs: return "EqualInputs";
        case errc::no_simple_root: return "NoSimpleRoot";
        case errc::index_prime: return "IndexPrime";
        case errc::bad_prime: return "BadPrime";
        case errc::search_exhausted: return "SearchExhausted";
        case errc::cap_exceeded: return "CapExceeded";
        case errc::infinity_point: return "InfinityPoint";
        case errc::coordinate_blowup: return "CoordinateBlowup";
        case errc::insufficient_primes: return "InsufficientPrimes";
        case errc::dimension_error: return "DimensionError";
        case errc::no_kernel: return "NoKernel";
        case errc::identically_zero_on_image: return "IdenticallyZeroOnImage";
        case errc::infeasible: return "Infeasible";
        case errc::all_zero: return "AllZero";
        case errc::config_error: return "ConfigError";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::internal_error: return "InternalError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) raise(code, what);
}

} // namespace ntheight
