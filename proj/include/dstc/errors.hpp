#pragma once
#include <stdexcept>
#include <string>

namespace dstc {

// error categories; the CLI maps these to exit codes
enum class ErrorKind { Shape, Parameter, Contract, Capacity, Unsupported, Singularity, Degenerate, Config, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  ErrorKind kind() const { return kind_; }
  const char* category() const;

 private:
  ErrorKind kind_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error(ErrorKind::Shape, m) {}
};
struct ParameterError : Error {
  explicit ParameterError(const std::string& m) : Error(ErrorKind::Parameter, m) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& m) : Error(ErrorKind::Contract, m) {}
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& m) : Error(ErrorKind::Capacity, m) {}
};
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& m) : Error(ErrorKind::Unsupported, m) {}
};
struct SingularityError : Error {
  explicit SingularityError(const std::string& m) : Error(ErrorKind::Singularity, m) {}
};
struct DegenerateBlockError : Error {
  explicit DegenerateBlockError(const std::string& m) : Error(ErrorKind::Degenerate, m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorKind::Config, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

inline const char* Error::category() const {
  switch (kind_) {
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Degenerate: return "degenerate_block";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace dstc
