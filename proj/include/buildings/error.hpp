#pragma once

#include <stdexcept>
#include <string>

namespace buildings {

enum class Errc {
  unknown_generator,
  unsupported_order,
  not_spherical,
  not_reduced,
  not_prenilpotent,
  nested_pair,
  division_by_zero,
  field_mismatch,
  wrong_edge,
  identity_input,
  cocycle_violation,
  panel_mismatch,
  not_realisable,
  not_3_spherical,
  out_of_range,
  unsupported_letter,
  unsupported_small_field,
  schema,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::unknown_generator: return "UNKNOWN_GENERATOR";
    case Errc::unsupported_order: return "UNSUPPORTED_ORDER";
    case Errc::not_spherical: return "NOT_SPHERICAL";
    case Errc::not_reduced: return "NOT_REDUCED";
    case Errc::not_prenilpotent: return "NOT_PRENILPOTENT";
    case Errc::nested_pair: return "NESTED_PAIR";
    case Errc::division_by_zero: return "DIVISION_BY_ZERO";
    case Errc::field_mismatch: return "FIELD_MISMATCH";
    case Errc::wrong_edge: return "WRONG_EDGE";
    case Errc::identity_input: return "IDENTITY_INPUT";
    case Errc::cocycle_violation: return "COCYCLE_VIOLATION";
    case Errc::panel_mismatch: return "PANEL_MISMATCH";
    case Errc::not_realisable: return "NOT_REALISABLE";
    case Errc::not_3_spherical: return "NOT_3_SPHERICAL";
    case Errc::out_of_range: return "OUT_OF_RANGE";
    case Errc::unsupported_letter: return "UNSUPPORTED_LETTER";
    case Errc::unsupported_small_field: return "UNSUPPORTED_SMALL_FIELD";
    case Errc::schema: return "SCHEMA";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace buildings
