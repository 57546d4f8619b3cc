#pragma once

#include <stdexcept>
#include <string>

namespace oscamp {

/// Base class of every error thrown by the library. `code()` is a stable
/// machine-readable identifier used by the command-line tool.
class error : public std::runtime_error
{
public:
    error(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct invalid_argument_error : error
{
    explicit invalid_argument_error(const std::string& what) : error("invalid_argument", what) {}
};

/// Rejected offspring law / polynomial map.
struct invalid_map_error : error
{
    explicit invalid_map_error(const std::string& what) : error("invalid_map", what) {}
};

/// Argument outside the domain where a formula (or its certificate) applies.
struct domain_error : error
{
    explicit domain_error(const std::string& what) : error("domain", what) {}
};

/// A sufficient condition for a remainder envelope did not hold.
struct certification_error : error
{
    explicit certification_error(const std::string& what) : error("certification", what) {}
};

/// An iterative procedure hit its cap.
struct convergence_error : error
{
    explicit convergence_error(const std::string& what) : error("convergence", what) {}
};

/// The requested tolerance is below what the working precision can deliver.
struct precision_error : error
{
    explicit precision_error(const std::string& what) : error("precision", what) {}
};

}  // namespace oscamp
