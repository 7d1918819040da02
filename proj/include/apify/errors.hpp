#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apify {

/// Base of every error raised by the toolchain.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Errors raised while reading COBOL, copybooks or screen maps. The CLI maps
/// this whole family to exit code 2.
class FrontendError : public Error {
public:
  using Error::Error;
};

class SyntaxError : public FrontendError {
public:
  SyntaxError(int line, const std::string &message)
      : FrontendError("syntax error at line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class MissingCopybook : public FrontendError {
public:
  explicit MissingCopybook(const std::string &name)
      : FrontendError("missing copybook: " + name), name_(name) {}
  const std::string &name() const { return name_; }

private:
  std::string name_;
};

class CopybookCycle : public FrontendError {
public:
  explicit CopybookCycle(const std::string &name)
      : FrontendError("copybook nesting cycle or depth limit at: " + name) {}
};

class DuplicateDataItem : public FrontendError {
public:
  DuplicateDataItem(const std::string &name, const std::string &path)
      : FrontendError("duplicate data item " + name + " under " + path) {}
};

class UnresolvedName : public FrontendError {
public:
  UnresolvedName(const std::string &identifier, int line, const std::string &why = "not declared")
      : FrontendError("unresolved name " + identifier + " at line " + std::to_string(line) + " (" +
                      why + ")"),
        identifier_(identifier), line_(line) {}
  const std::string &identifier() const { return identifier_; }
  int line() const { return line_; }

private:
  std::string identifier_;
  int line_;
};

class MapSyntaxError : public FrontendError {
public:
  MapSyntaxError(int line, const std::string &message)
      : FrontendError("screen map error at line " + std::to_string(line) + ": " + message) {}
};

class UnknownParagraph : public FrontendError {
public:
  UnknownParagraph(const std::string &name, int line)
      : FrontendError("unknown paragraph " + name + " at line " + std::to_string(line)) {}
};

class DuplicateProgram : public FrontendError {
public:
  explicit DuplicateProgram(const std::string &id) : FrontendError("duplicate program id " + id) {}
};

/// A region selector or region bounds that do not denote any statements.
class InvalidRegion : public Error {
public:
  using Error::Error;
};

/// A region or API selector that names nothing in the workspace.
class UnresolvedSelector : public Error {
public:
  using Error::Error;
};

class PathBudgetExceeded : public Error {
public:
  explicit PathBudgetExceeded(std::size_t explored)
      : Error("path budget exceeded after " + std::to_string(explored) + " paths"),
        explored_(explored) {}
  std::size_t explored() const { return explored_; }

private:
  std::size_t explored_;
};

class NonTerminatingFixpoint : public Error {
public:
  explicit NonTerminatingFixpoint(const std::string &what)
      : Error("fixpoint iteration cap reached: " + what) {}
};

class MissingCallee : public Error {
public:
  explicit MissingCallee(const std::string &name) : Error("callee not in workspace: " + name) {}
};

class UnknownTransactionProgram : public Error {
public:
  explicit UnknownTransactionProgram(const std::string &txn)
      : Error("transaction " + txn + " names a program absent from the workspace") {}
};

class NoDataAccess : public Error {
public:
  explicit NoDataAccess(const std::string &program)
      : Error("program " + program + " has no SQL statements") {}
};

class EmptySlice : public Error {
public:
  explicit EmptySlice(const std::string &role)
      : Error("no " + role + " field belongs to the copybook") {}
};

class BindingMismatch : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace apify
