#ifndef LATTICEGUARD_ERRORS_HPP
#define LATTICEGUARD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latticeguard {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define LATTICEGUARD_DEFINE_ERROR(Name)                                \
    class Name final : public Error {                                  \
    public:                                                            \
        explicit Name(const std::string& what) : Error(what) {}        \
    }

LATTICEGUARD_DEFINE_ERROR(SingularGenerator);
LATTICEGUARD_DEFINE_ERROR(DimensionTooLarge);
LATTICEGUARD_DEFINE_ERROR(NotNested);
LATTICEGUARD_DEFINE_ERROR(NotCoprime);
LATTICEGUARD_DEFINE_ERROR(NotSubcode);
LATTICEGUARD_DEFINE_ERROR(NonInvertible);
LATTICEGUARD_DEFINE_ERROR(WindowTooLarge);
LATTICEGUARD_DEFINE_ERROR(SupportViolation);
LATTICEGUARD_DEFINE_ERROR(EpsilonTooLarge);
LATTICEGUARD_DEFINE_ERROR(GroupTooSmall);
LATTICEGUARD_DEFINE_ERROR(NotReduced);
LATTICEGUARD_DEFINE_ERROR(ZeroGain);
LATTICEGUARD_DEFINE_ERROR(ConfigError);

#undef LATTICEGUARD_DEFINE_ERROR

} // namespace latticeguard

#endif
