#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kramers/core.hpp"

namespace kramers {

// A smooth potential on R^dim (dim 1 or 2) with analytic derivatives.
class ScalarField {
  public:
    virtual ~ScalarField() = default;
    virtual int dim() const = 0;
    virtual double value(const Pt& x) const = 0;
    virtual Pt grad(const Pt& x) const = 0;
    virtual Sym2 hess(const Pt& x) const = 0;
    virtual std::string smoothness() const { return "C_inf"; }
    virtual std::string name() const = 0;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

struct FieldEval {
    double value;
    Pt grad;
    Sym2 hess;
};

inline FieldEval eval_field(const ScalarField& f, const Pt& x) {
    return {f.value(x), f.grad(x), f.hess(x)};
}

// Compactly supported C-infinity mollifier amp*exp(1 - 1/(1-s^2)), s=|x-c|/r.
class BumpField final : public ScalarField {
  public:
    BumpField(int dim, Pt center, double radius, double amplitude);
    int dim() const override { return dim_; }
    double value(const Pt& x) const override;
    Pt grad(const Pt& x) const override;
    Sym2 hess(const Pt& x) const override;
    std::string name() const override { return "bump"; }
    Pt center() const { return center_; }
    double radius() const { return radius_; }

  private:
    int dim_;
    Pt center_;
    double radius_, amp_;
};

// f + sum of perturbations (used for biased potentials f + delta_f).
class SumField final : public ScalarField {
  public:
    explicit SumField(std::vector<FieldPtr> terms);
    int dim() const override { return terms_[0]->dim(); }
    double value(const Pt& x) const override;
    Pt grad(const Pt& x) const override;
    Sym2 hess(const Pt& x) const override;
    std::string smoothness() const override;
    std::string name() const override;

  private:
    std::vector<FieldPtr> terms_;
};

class NegatedField final : public ScalarField {
  public:
    explicit NegatedField(FieldPtr base) : base_(std::move(base)) {}
    int dim() const override { return base_->dim(); }
    double value(const Pt& x) const override { return -base_->value(x); }
    Pt grad(const Pt& x) const override {
        Pt g = base_->grad(x);
        return {-g[0], -g[1]};
    }
    Sym2 hess(const Pt& x) const override {
        Sym2 h = base_->hess(x);
        return {-h.xx, -h.xy, -h.yy};
    }
    std::string smoothness() const override { return base_->smoothness(); }
    std::string name() const override { return "neg(" + base_->name() + ")"; }

  private:
    FieldPtr base_;
};

}  // namespace kramers
