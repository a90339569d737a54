#pragma once

#include <stdexcept>
#include <string>

namespace gridformer {

// Base class for every domain error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define GRIDFORMER_DEFINE_ERROR(Name)                                       \
    struct Name : Error {                                                   \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

GRIDFORMER_DEFINE_ERROR(DimensionMismatch);
GRIDFORMER_DEFINE_ERROR(NearSingularResolvent);
GRIDFORMER_DEFINE_ERROR(IllPosedLoop);
GRIDFORMER_DEFINE_ERROR(UnstableModel);
GRIDFORMER_DEFINE_ERROR(NonpositiveTau);
GRIDFORMER_DEFINE_ERROR(NoEquilibrium);
GRIDFORMER_DEFINE_ERROR(UnsupportedArchitecture);
GRIDFORMER_DEFINE_ERROR(SingularAdmittance);
GRIDFORMER_DEFINE_ERROR(BandOutsideGrid);
GRIDFORMER_DEFINE_ERROR(SingularInteriorBlock);
GRIDFORMER_DEFINE_ERROR(SingularClosedLoop);
GRIDFORMER_DEFINE_ERROR(SingularBlock);
GRIDFORMER_DEFINE_ERROR(SingularBMatrix);
GRIDFORMER_DEFINE_ERROR(SearchSpaceTooLarge);
GRIDFORMER_DEFINE_ERROR(NoBracket);
GRIDFORMER_DEFINE_ERROR(InvalidCaseFile);

#undef GRIDFORMER_DEFINE_ERROR

} // namespace gridformer
