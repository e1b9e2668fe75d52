#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace resetfp {

enum class Errc {
  NonPositiveResetPoint,
  NegativeRate,
  NonFinite,
  InvalidArgument,
  NoResetLimit,
  RangeOverflow,
  DegenerateVariance,
  PositiveDriftNoReset,
  SingularCoupling,
  IllConditioned,
  FarFieldMissing,
  ContourFailure,
  FunctionalUnavailable,
  EmptySample,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// True for failures of a numeric procedure rather than of the caller's input.
  bool is_numeric() const noexcept {
    return code_ == Errc::SingularCoupling || code_ == Errc::IllConditioned ||
           code_ == Errc::ContourFailure || code_ == Errc::RangeOverflow ||
           code_ == Errc::DegenerateVariance;
  }

 private:
  Errc code_;
};

/// Marker for a quantity that has no closed form at the requested parameters.
struct Unavailable {
  std::string reason;
};

/// A value, or the reason it could not be produced. Missing closed forms are an
/// expected outcome, not an error, so they travel as data.
template <class T>
class Maybe {
 public:
  Maybe(T value) : state_(std::move(value)) {}
  Maybe(Unavailable missing) : state_(std::move(missing)) {}

  bool has_value() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return has_value(); }

  const T& value() const {
    if (!has_value()) {
      throw Error(Errc::FunctionalUnavailable, std::get<Unavailable>(state_).reason);
    }
    return std::get<T>(state_);
  }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }

  T value_or(T fallback) const { return has_value() ? std::get<T>(state_) : fallback; }

  std::string reason() const {
    return has_value() ? std::string{} : std::get<Unavailable>(state_).reason;
  }

 private:
  std::variant<T, Unavailable> state_;
};

}  // namespace resetfp
