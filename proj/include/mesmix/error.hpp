#pragma once

#include <stdexcept>
#include <string>

namespace mesmix {

enum class ErrorCode {
  out_of_domain,
  invalid_curve,
  domain_mismatch,
  template_mismatch,
  not_contractible,
  not_mergeable,
  unbounded_variable,
  name_too_long,
  too_many_binaries,
  invalid_instance,
};

inline const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define MESMIX_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

MESMIX_DEFINE_ERROR(OutOfDomain, out_of_domain)
MESMIX_DEFINE_ERROR(InvalidCurve, invalid_curve)
MESMIX_DEFINE_ERROR(DomainMismatch, domain_mismatch)
MESMIX_DEFINE_ERROR(TemplateMismatch, template_mismatch)
MESMIX_DEFINE_ERROR(NotContractible, not_contractible)
MESMIX_DEFINE_ERROR(NotMergeable, not_mergeable)
MESMIX_DEFINE_ERROR(UnboundedVariable, unbounded_variable)
MESMIX_DEFINE_ERROR(NameTooLong, name_too_long)
MESMIX_DEFINE_ERROR(TooManyBinaries, too_many_binaries)
MESMIX_DEFINE_ERROR(InvalidInstance, invalid_instance)

#undef MESMIX_DEFINE_ERROR

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::out_of_domain: return "OutOfDomain";
    case ErrorCode::invalid_curve: return "InvalidCurve";
    case ErrorCode::domain_mismatch: return "DomainMismatch";
    case ErrorCode::template_mismatch: return "TemplateMismatch";
    case ErrorCode::not_contractible: return "NotContractible";
    case ErrorCode::not_mergeable: return "NotMergeable";
    case ErrorCode::unbounded_variable: return "UnboundedVariable";
    case ErrorCode::name_too_long: return "NameTooLong";
    case ErrorCode::too_many_binaries: return "TooManyBinaries";
    case ErrorCode::invalid_instance: return "InvalidInstance";
  }
  return "Error";
}

}  // namespace mesmix
