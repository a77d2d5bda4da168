#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace asp {

// Either a value or an error. Used where failure is ordinary data (parse
// diagnostics, type errors); engine invariant violations throw instead.
template <class T, class E>
class ErrorOr {
 public:
  ErrorOr(T value) : v_(std::in_place_index<0>, std::move(value)) {}  // NOLINT
  ErrorOr(E error) : v_(std::in_place_index<1>, std::move(error)) {}  // NOLINT

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<0>(v_); }
  T& value() & { return std::get<0>(v_); }
  T&& value() && { return std::get<0>(std::move(v_)); }
  const E& error() const& { return std::get<1>(v_); }

  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, E> v_;
};

// Raised when adjusting annotations would make one negative. Reaching this
// from a well-typed term indicates a bug in the reduction engine.
class AnnotationUnderflow : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised by step() when the requested redex does not match the term.
class StuckRedex : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace asp
