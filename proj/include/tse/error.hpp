#ifndef TSE_ERROR_HPP
#define TSE_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tse {

enum class ErrorKind {
  InvalidArgument,
  NoEquilibrium,
  DegenerateClamp,
  BoundaryCase,
  UnresolvedPrediction,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. The kind drives CLI exit codes; the
/// optional step index is attached when a failure happens mid-trajectory.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(what), kind_(kind), step_(step) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> step_;
};

}  // namespace tse

#endif  // TSE_ERROR_HPP
