#pragma once

#include <stdexcept>
#include <string>

namespace ontosim {

// All library failures derive from Error so front-ends can catch one type
// and still dispatch on the concrete kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedLaw : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class ConflictingSpecialPoints : public InvalidModel {
 public:
  using InvalidModel::InvalidModel;
};

class NotBijective : public InvalidModel {
 public:
  using InvalidModel::InvalidModel;
};

class SizeCapExceeded : public Error {
 public:
  using Error::Error;
};

class UnreachableTolerance : public Error {
 public:
  using Error::Error;
};

class NotRepresentable : public Error {
 public:
  using Error::Error;
};

class NonHermitian : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ontosim
