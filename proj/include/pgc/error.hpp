#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pgc {

// Every failure raised by the library carries a short category tag. The CLI
// prints it verbatim as the first token of its one-line error report.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

#define PGC_DEFINE_ERROR(Name, tag)                                            \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(tag, what) {}           \
    };

PGC_DEFINE_ERROR(DimensionError, "dimension")
PGC_DEFINE_ERROR(ParameterError, "parameter")
PGC_DEFINE_ERROR(DomainError, "domain")
PGC_DEFINE_ERROR(FormatError, "format")
PGC_DEFINE_ERROR(LookupError, "lookup")
PGC_DEFINE_ERROR(StateError, "state")
PGC_DEFINE_ERROR(IoError, "io")
PGC_DEFINE_ERROR(ConfigError, "config")
PGC_DEFINE_ERROR(MissingInputError, "missing_input")

#undef PGC_DEFINE_ERROR

} // namespace pgc
