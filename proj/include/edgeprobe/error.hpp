// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace edgeprobe {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (bad JSON, bad magic, truncated record, bad column count).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Data that parses but violates a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(const std::string& label)
      : Error("unknown label: " + label), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// A span whose content vanished under retokenization.
class UnalignedSpan : public Error {
 public:
  using Error::Error;
};

// Tensor or matrix dimensions that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgeprobe
