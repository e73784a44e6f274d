#ifndef CAUSALABS_ERRORS_HPP
#define CAUSALABS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace causalabs {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CAUSALABS_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// graph
CAUSALABS_DEFINE_ERROR(CycleError);
CAUSALABS_DEFINE_ERROR(RangeError);
CAUSALABS_DEFINE_ERROR(DuplicateEdge);
CAUSALABS_DEFINE_ERROR(PartitionMismatch);
CAUSALABS_DEFINE_ERROR(EmptyTarget);

// setcalc
CAUSALABS_DEFINE_ERROR(SizeError);
CAUSALABS_DEFINE_ERROR(UniverseMismatch);

// abstraction
CAUSALABS_DEFINE_ERROR(NotSurjective);
CAUSALABS_DEFINE_ERROR(NotBijective);
CAUSALABS_DEFINE_ERROR(DimensionMismatch);
CAUSALABS_DEFINE_ERROR(InternalError);

// scm / eval
CAUSALABS_DEFINE_ERROR(SingularMatrix);
CAUSALABS_DEFINE_ERROR(EmptyInput);
CAUSALABS_DEFINE_ERROR(EmptyDataset);

// learn
CAUSALABS_DEFINE_ERROR(ConfigError);
CAUSALABS_DEFINE_ERROR(NumericalOverflow);

// io
CAUSALABS_DEFINE_ERROR(SpecError);
CAUSALABS_DEFINE_ERROR(IoError);

#undef CAUSALABS_DEFINE_ERROR

}  // namespace causalabs

#endif  // CAUSALABS_ERRORS_HPP
