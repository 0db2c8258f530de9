// errors.hpp — Exception hierarchy with machine-readable categories

#pragma once

#include <stdexcept>
#include <string>

namespace surfnoise {

// Base error. `category()` is stable and machine-readable; the CLI maps it to
// an exit code and prints it on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain", msg) {}
};

struct StaticDivergence : Error {
    explicit StaticDivergence(const std::string& msg) : Error("static_divergence", msg) {}
};

struct OutOfRange : Error {
    explicit OutOfRange(const std::string& msg) : Error("out_of_range", msg) {}
};

struct CoincidentPoints : Error {
    explicit CoincidentPoints(const std::string& msg) : Error("coincident_points", msg) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg) : Error("quadrature", msg) {}
};

struct MethodInvalid : Error {
    explicit MethodInvalid(const std::string& msg) : Error("method", msg) {}
};

struct UnsupportedStaticLimit : Error {
    explicit UnsupportedStaticLimit(const std::string& msg) : Error("static_limit", msg) {}
};

struct OrderUnsupported : Error {
    explicit OrderUnsupported(const std::string& msg) : Error("order", msg) {}
};

struct SiteBelowSurface : Error {
    explicit SiteBelowSurface(const std::string& msg) : Error("site_below_surface", msg) {}
};

struct RangeTooNarrow : Error {
    explicit RangeTooNarrow(const std::string& msg) : Error("range", msg) {}
};

struct DegenerateModes : Error {
    explicit DegenerateModes(const std::string& msg) : Error("degenerate_modes", msg) {}
};

struct IntegratorFailure : Error {
    explicit IntegratorFailure(const std::string& msg) : Error("integrator", msg) {}
};

} // namespace surfnoise
