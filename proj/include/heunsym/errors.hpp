#ifndef HEUNSYM_ERRORS_HPP
#define HEUNSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heunsym {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FuchsRelationViolated : Error { using Error::Error; };
struct DuplicatePoints : Error { using Error::Error; };
struct SingularPointHit : Error { using Error::Error; };
struct SingularAtOrigin : Error { using Error::Error; };
struct DegenerateMap : Error { using Error::Error; };
struct DegenerateCrossRatio : Error { using Error::Error; };
struct DegenerateFrame : Error { using Error::Error; };
struct ResonantGamma : Error { using Error::Error; };
struct ResonantExponents : Error { using Error::Error; };
struct LogarithmicCase : Error { using Error::Error; };
struct ZeroModulus : Error { using Error::Error; };
struct OutsideDisk : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };
struct BadFamilyForConfig : Error { using Error::Error; };
struct NotCanonical : Error { using Error::Error; };
struct InsufficientTerms : Error { using Error::Error; };
struct SingularApproach : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };
struct NonIntegrableEndpoint : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct NoRootInWindow : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

} // namespace heunsym

#endif
