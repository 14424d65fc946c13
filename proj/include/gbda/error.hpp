#pragma once

#include <stdexcept>
#include <string>

namespace gbda {

/// Malformed or inconsistent input data (corpus files, prior files, graphs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A prior file whose schema or version does not match this build.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class VersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

}  // namespace gbda
