#pragma once

#include <stdexcept>
#include <string>

namespace mimitag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (CSV row, JSON document).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input violating a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Wavelength outside a tabulated range; no extrapolation.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Ambient medium with kappa != 0 at a simulated wavelength.
class LossyAmbient : public Error {
 public:
  using Error::Error;
};

// Spectrum grid does not cover the color-matching-function support.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// All-zero tristimulus has no chromaticity.
class DegenerateColor : public Error {
 public:
  using Error::Error;
};

// Payload does not fit QR versions 1-4 at the requested EC level.
class PayloadTooLarge : public Error {
 public:
  using Error::Error;
};

// Image dimensions do not match any rendered tag geometry.
class NotATag : public Error {
 public:
  using Error::Error;
};

}  // namespace mimitag
