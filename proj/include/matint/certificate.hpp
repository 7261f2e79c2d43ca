#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "matint/interp.hpp"
#include "matint/srs.hpp"

namespace matint::cert {

inline constexpr const char* kToolVersion = "matint 1.0.0";

struct Step {
  interp::Mode mode = interp::Mode::Relative;
  bool reversed = false;
  // Indices into the system remaining before this step (unreversed order).
  std::vector<std::size_t> removed;
  interp::Interpretation interp;
  // Top-relative steps normally rely on the syntactic marker test; an
  // asserted step was forced by the user and is reported as such.
  bool top_asserted = false;
  std::string search;  // free-form search parameters, informational
  bool operator==(const Step&) const = default;
};

struct Certificate {
  std::string tool = kToolVersion;
  std::string config;  // search configuration, informational
  srs::Srs system;
  std::vector<Step> steps;
  bool complete = true;  // false: the remaining rules were left unproved
  bool operator==(const Certificate&) const = default;
};

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fingerprint(const srs::Srs& s);
std::string write_certificate(const Certificate& c);
Certificate parse_certificate(std::string_view text);

struct VerifyResult {
  bool accepted = false;
  bool complete = false;
  std::size_t failed_step = 0;  // 1-based; 0 when no step failed
  std::string reason;
  srs::Srs remaining;
  std::vector<std::string> notes;
};

VerifyResult verify_certificate(const Certificate& c, const srs::Srs& original);

}  // namespace matint::cert
