#pragma once

#include <stdexcept>
#include <string>

namespace acecost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidFormat : public Error {
 public:
  using Error::Error;
};

/// Fixed-point and floating-point operands mixed in an addition.
class MixedKindError : public Error {
 public:
  using Error::Error;
};

class UnsupportedExtrapolation : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NonPositiveScale : public Error {
 public:
  using Error::Error;
};

/// Errors that name the graph node they were raised for.
class NodeError : public Error {
 public:
  NodeError(std::string node_id, const std::string& what)
      : Error(what), node_id_(std::move(node_id)) {}
  const std::string& node_id() const noexcept { return node_id_; }

 private:
  std::string node_id_;
};

/// Malformed IR document. `path` is a JSON-pointer-like location.
class ParseError : public NodeError {
 public:
  ParseError(std::string node_id, std::string path, const std::string& what)
      : NodeError(std::move(node_id), what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class UnknownKind : public ParseError {
 public:
  using ParseError::ParseError;
};

class DanglingInput : public NodeError {
 public:
  DanglingInput(std::string node_id, std::string missing)
      : NodeError(std::move(node_id), "input '" + missing + "' does not resolve"),
        missing_(std::move(missing)) {}
  const std::string& missing() const noexcept { return missing_; }

 private:
  std::string missing_;
};

class ShapeMismatch : public NodeError {
 public:
  using NodeError::NodeError;
};

class MissingShape : public NodeError {
 public:
  using NodeError::NodeError;
};

class MissingFormat : public NodeError {
 public:
  using NodeError::NodeError;
};

/// A cost-model error re-raised with the layer it occurred in.
class AnalysisError : public NodeError {
 public:
  using NodeError::NodeError;
};

}  // namespace acecost
