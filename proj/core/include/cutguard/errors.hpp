#pragma once

#include <stdexcept>
#include <string>

namespace cutguard {

// Base for every library error. `kind()` is a stable machine-readable name
// that the CLI prints alongside the human message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CUTGUARD_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& message)                    \
            : Error(#Name, message) {}                               \
    }

CUTGUARD_DEFINE_ERROR(BadMagic);
CUTGUARD_DEFINE_ERROR(TruncatedFile);
CUTGUARD_DEFINE_ERROR(NonFiniteValue);
CUTGUARD_DEFINE_ERROR(DimMismatch);
CUTGUARD_DEFINE_ERROR(IndexGap);
CUTGUARD_DEFINE_ERROR(IoError);
CUTGUARD_DEFINE_ERROR(EmptyHistory);
CUTGUARD_DEFINE_ERROR(TooShort);
CUTGUARD_DEFINE_ERROR(LengthMismatch);
CUTGUARD_DEFINE_ERROR(UnknownPreset);
CUTGUARD_DEFINE_ERROR(ConfigInvalid);
CUTGUARD_DEFINE_ERROR(InvalidFeature);
CUTGUARD_DEFINE_ERROR(SourceTooShort);
CUTGUARD_DEFINE_ERROR(InvalidSpec);
CUTGUARD_DEFINE_ERROR(EmptyRegion);
CUTGUARD_DEFINE_ERROR(EmptyCorpus);
CUTGUARD_DEFINE_ERROR(NoFreeConstants);

#undef CUTGUARD_DEFINE_ERROR

} // namespace cutguard
