#pragma once

#include <stdexcept>
#include <string>

namespace se3diffreg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rotation angle within 1e-6 of pi; the logarithm is numerically
/// ill-conditioned there. Callers reject the input or re-sample.
class NearCutLocus : public Error {
public:
    using Error::Error;
};

class InvalidStepCount : public Error {
public:
    using Error::Error;
};

class StepOutOfRange : public Error {
public:
    using Error::Error;
};

/// The scaled noise twist kept landing near the cut locus after the maximum
/// number of re-draws; gamma is too large for the schedule.
class PerturbationResampleExceeded : public Error {
public:
    using Error::Error;
};

class EmptyCloud : public Error {
public:
    using Error::Error;
};

/// Source points are collinear or coincident; the cross-covariance SVD
/// cannot recover a rotation.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class MissingTruth : public Error {
public:
    using Error::Error;
};

class MissingCorrespondences : public Error {
public:
    using Error::Error;
};

class InsufficientPoints : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(-1) {}
    long line() const { return line_; }

private:
    long line_;
};

class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

class MissingFile : public Error {
public:
    using Error::Error;
};

class EmptyList : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace se3diffreg
