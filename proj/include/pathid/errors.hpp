#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pathid {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownVertex : public Error {
 public:
  explicit UnknownVertex(const std::string& name)
      : Error("unknown vertex '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class CycleDetected : public Error {
 public:
  explicit CycleDetected(std::vector<std::string> cycle);
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class OverlappingSets : public Error {
 public:
  using Error::Error;
};

class HasBidirected : public Error {
 public:
  HasBidirected() : Error("operation requires a graph without bidirected edges") {}
};

class InvalidPath : public Error {
 public:
  using Error::Error;
};

class InvalidQuery : public Error {
 public:
  using Error::Error;
};

class UncoveredChild : public Error {
 public:
  UncoveredChild(const std::string& treatment, const std::string& child)
      : Error("child '" + child + "' of '" + treatment + "' is not covered by any component"),
        treatment_(treatment),
        child_(child) {}
  const std::string& treatment() const { return treatment_; }
  const std::string& child() const { return child_; }

 private:
  std::string treatment_;
  std::string child_;
};

// Some edge out of a treatment starts both a path in the active set and a
// proper causal path outside it. witness() is the first such child in
// topological order.
class EdgeInconsistent : public Error {
 public:
  EdgeInconsistent(std::string witness, std::vector<std::string> all_witnesses)
      : Error("edge-inconsistent path set: recanting witness '" + witness + "'"),
        witness_(std::move(witness)),
        all_(std::move(all_witnesses)) {}
  const std::string& witness() const { return witness_; }
  const std::vector<std::string>& all_witnesses() const { return all_; }

 private:
  std::string witness_;
  std::vector<std::string> all_;
};

class ZeroConditioning : public Error {
 public:
  ZeroConditioning() : Error("conditioning event has probability zero") {}
  explicit ZeroConditioning(const std::string& detail)
      : Error("conditioning event has probability zero: " + detail) {}
};

class MissingVariable : public Error {
 public:
  explicit MissingVariable(const std::string& name)
      : Error("variable '" + name + "' is not available"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ModeMismatch : public Error {
 public:
  using Error::Error;
};

class NotBinary : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class EpsilonTooLarge : public Error {
 public:
  using Error::Error;
};

class EnumerationLimit : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, int line, const std::string& message)
      : Error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

}  // namespace pathid
