#pragma once

// Kantorovich operators: monotone, convex (backward) or concave (forward),
// constant-translating maps on potentials. Operators are immutable; apply is
// pure and reentrant.

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "kantor/kernels.hpp"
#include "kantor/space.hpp"

namespace kantor {

enum class Direction { backward, forward };

class Operator {
  public:
    virtual ~Operator() = default;

    Direction direction() const { return dir_; }
    const FiniteSpace& input() const { return in_; }    // space of f
    const FiniteSpace& output() const { return out_; }  // space of Tf

    virtual std::vector<double> apply(const std::vector<double>& f) const = 0;

    Potential operator()(const Potential& f) const {
        if (!same_space(f.space, in_)) throw std::invalid_argument("operator/potential space mismatch");
        return Potential{out_, apply(f.v)};
    }

    // Row-stochastic output.n x input.n matrix of maximizer weights: the
    // supergradient rows of x -> Tf(x). Used by dual ascent.
    virtual Mat supergradient(const std::vector<double>& f) const;
    virtual bool has_supergradient() const { return false; }

  protected:
    Operator(Direction d, FiniteSpace in, FiniteSpace out)
        : dir_(d), in_(std::move(in)), out_(std::move(out)) {}

  private:
    Direction dir_;
    FiniteSpace in_, out_;
};

using OperatorPtr = std::shared_ptr<const Operator>;

// T-f(x) = max_y f(y) - C(x,y)   (backward operator of a cost on X x Y)
class CostBackwardOp : public Operator {
  public:
    CostBackwardOp(Mat cost, FiniteSpace source, FiniteSpace target);
    std::vector<double> apply(const std::vector<double>& f) const override;
    Mat supergradient(const std::vector<double>& f) const override;
    bool has_supergradient() const override { return true; }
    const Mat& cost() const { return cost_; }

  private:
    Mat cost_;
};

// T+f(y) = min_x f(x) + C(x,y)   (forward operator of the same cost)
class CostForwardOp : public Operator {
  public:
    CostForwardOp(Mat cost, FiniteSpace source, FiniteSpace target);
    std::vector<double> apply(const std::vector<double>& f) const override;
    Mat supergradient(const std::vector<double>& f) const override;
    bool has_supergradient() const override { return true; }
    const Mat& cost() const { return cost_; }

  private:
    Mat cost_;
};

// Tf(x) = sum_y P(x,y) f(y)   (Markov operator; backward direction)
class MarkovOp : public Operator {
  public:
    MarkovOp(Mat kernel, FiniteSpace source, FiniteSpace target);
    std::vector<double> apply(const std::vector<double>& f) const override;
    Mat supergradient(const std::vector<double>& f) const override;
    bool has_supergradient() const override { return true; }
    const Mat& kernel() const { return kernel_; }

  private:
    Mat kernel_;
};

// Tf(x) = log sum_y S(x,y) e^{f(y)}   (Schroedinger / entropic operator)
class EntropicOp : public Operator {
  public:
    EntropicOp(Mat kernel, FiniteSpace source, FiniteSpace target);
    std::vector<double> apply(const std::vector<double>& f) const override;
    Mat supergradient(const std::vector<double>& f) const override;
    bool has_supergradient() const override { return true; }
    const Mat& kernel() const { return kernel_; }

  private:
    Mat kernel_;
};

// Tf = f o sigma   (prescribed push-forward)
class PushforwardOp : public Operator {
  public:
    PushforwardOp(std::vector<int> sigma, FiniteSpace source, FiniteSpace target);
    std::vector<double> apply(const std::vector<double>& f) const override;
    Mat supergradient(const std::vector<double>& f) const override;
    bool has_supergradient() const override { return true; }
    const std::vector<int>& sigma() const { return sigma_; }

  private:
    std::vector<int> sigma_;
};

// (T1 o T2) f = T1(T2 f); for backward transfers this is the operator of
// the inf-convolution T1 * T2.
class CompositeOp : public Operator {
  public:
    CompositeOp(OperatorPtr outer, OperatorPtr inner);
    std::vector<double> apply(const std::vector<double>& f) const override;
    Mat supergradient(const std::vector<double>& f) const override;
    bool has_supergradient() const override;
    const OperatorPtr& outer() const { return outer_; }
    const OperatorPtr& inner() const { return inner_; }

  private:
    OperatorPtr outer_, inner_;
};

// f -> T1 f + T2 f  (dual-sum operator; square operation)
class SumOp : public Operator {
  public:
    SumOp(OperatorPtr a, OperatorPtr b);
    std::vector<double> apply(const std::vector<double>& f) const override;

  private:
    OperatorPtr a_, b_;
};

// f -> a T(f / a), a > 0
class ScaledOp : public Operator {
  public:
    ScaledOp(double a, OperatorPtr base);
    std::vector<double> apply(const std::vector<double>& f) const override;

  private:
    double a_;
    OperatorPtr base_;
};

// identity and the null-transfer operator T-f = sup f
OperatorPtr identity_op(const FiniteSpace& s, Direction d = Direction::backward);
OperatorPtr sup_op(const FiniteSpace& s);

// ---- axiom suite ----
// Checks (a) monotone, (b) convex/concave per direction, (c) T(f+k)=Tf+k on
// random probe pairs. Worst violations are reported; pass means all within
// tolerance.
struct AxiomReport {
    double monotonicity = 0.0;
    double convexity = 0.0;
    double translation = 0.0;
    bool pass = false;
};

AxiomReport check_axioms(const Operator& op, int probes = 200, uint64_t seed = 1,
                         double tol_convex = 1e-10, double tol_translate = 1e-12);

}  // namespace kantor
