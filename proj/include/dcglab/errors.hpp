#pragma once

#include <stdexcept>
#include <string>

namespace dcglab {

/// Base class for every error raised by the library. `kind()` is a short
/// stable tag used by the CLI for machine-parseable error lines.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char* kind() const noexcept = 0;
};

#define DCGLAB_DEFINE_ERROR(Name, tag)                                   \
    class Name : public Error {                                          \
    public:                                                              \
        using Error::Error;                                              \
        [[nodiscard]] const char* kind() const noexcept override { return tag; } \
    }

DCGLAB_DEFINE_ERROR(ShapeError, "shape");
DCGLAB_DEFINE_ERROR(ArgumentError, "argument");
DCGLAB_DEFINE_ERROR(SizeError, "size");
DCGLAB_DEFINE_ERROR(FormatError, "format");
DCGLAB_DEFINE_ERROR(IntegrityError, "integrity");
DCGLAB_DEFINE_ERROR(IoError, "io");

#undef DCGLAB_DEFINE_ERROR

}  // namespace dcglab
