#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace magspec {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Grid or interval too coarse for the requested certification.
class DiscretizationError : public Error {
public:
    using Error::Error;
};

/// Minimizer search could not establish unimodality.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Geometric failure: projection, chart radius, tangent point.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Parameters outside the quantified hypotheses of a bound.
class RegimeError : public Error {
public:
    using Error::Error;
};

struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    Vec3 extent() const { return hi - lo; }
    bool contains(const Vec3& x) const {
        return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    }
};

inline constexpr double pi = 3.14159265358979323846;

} // namespace magspec
