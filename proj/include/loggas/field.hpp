#pragma once

#include <memory>

#include "loggas/density.hpp"

namespace loggas {

// Time-dependent Stieltjes transform U_t(z) on C minus the support.
class UField {
 public:
  virtual ~UField() = default;
  virtual cplx u(double t, cplx z) const = 0;
  virtual cplx du(double t, cplx z) const = 0;
  virtual cplx d2u(double t, cplx z) const;
};

class StationaryField : public UField {
 public:
  explicit StationaryField(std::shared_ptr<const Density> d) : d_(std::move(d)) {}
  cplx u(double, cplx z) const override { return d_->stieltjes(z); }
  cplx du(double, cplx z) const override { return d_->stieltjes_d1(z); }
  cplx d2u(double, cplx z) const override { return d_->stieltjes_d2(z); }
  const Density& density() const { return *d_; }

 private:
  std::shared_ptr<const Density> d_;
};

// Harmonic β=2 scaling family U_t(z) = U_eq(z/s)/s with s = s(t).
class ScalingField : public UField {
 public:
  explicit ScalingField(double s0) : s0_(s0) {}
  double s(double t) const;
  double s0() const { return s0_; }
  cplx u(double t, cplx z) const override;
  cplx du(double t, cplx z) const override;
  cplx d2u(double t, cplx z) const override;
  std::shared_ptr<const Density> density_at(double t) const;

 private:
  double s0_;
};

}  // namespace loggas
