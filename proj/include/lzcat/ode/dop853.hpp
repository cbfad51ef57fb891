#pragma once

// Embedded Runge-Kutta 8(5,3) pair of Dormand & Prince (Hairer's DOP853
// coefficients) for complex vector ODEs y' = f(t, y), with a PI step-size
// controller and exact landing on caller-supplied output times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "lzcat/error.hpp"

namespace lzcat::ode {

struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
};

struct StepControl {
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects the step automatically
  long max_steps = 100'000'000;
  double safety = 0.9;
  double min_factor = 0.333;  // hnew/h bounds
  double max_factor = 6.0;
  double beta = 0.04;         // PI (Lund) stabilization
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

namespace dop853 {
// clang-format off
inline constexpr double
  c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
  c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
  c6 = 0.333333333333333333333333333333e+00, c7 = 0.25e+00,
  c8 = 0.307692307692307692307692307692e+00, c9 = 0.651282051282051282051282051282e+00,
  c10 = 0.6e+00, c11 = 0.857142857142857142857142857142e+00,
  b1 = 5.42937341165687622380535766363e-2, b6 = 4.45031289275240888144113950566e0,
  b7 = 1.89151789931450038304281599044e0, b8 = -5.8012039600105847814672114227e0,
  b9 = 3.1116436695781989440891606237e-1, b10 = -1.52160949662516078556178806805e-1,
  b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2,
  bhh1 = 0.244094488188976377952755905512e+00, bhh2 = 0.733846688281611857341361741547e+00,
  bhh3 = 0.220588235294117647058823529412e-01,
  er1 = 0.1312004499419488073250102996e-01, er6 = -0.1225156446376204440720569753e+01,
  er7 = -0.4957589496572501915214079952e+00, er8 = 0.1664377182454986536961530415e+01,
  er9 = -0.3503288487499736816886487290e+00, er10 = 0.3341791187130174790297318841e+00,
  er11 = 0.8192320648511571246570742613e-01, er12 = -0.2235530786388629525884427845e-01,
  a21 = 5.26001519587677318785587544488e-2,
  a31 = 1.97250569845378994544595329183e-2, a32 = 5.91751709536136983633785987549e-2,
  a41 = 2.95875854768068491816892993775e-2, a43 = 8.87627564304205475450678981324e-2,
  a51 = 2.41365134159266685502369798665e-1, a53 = -8.84549479328286085344864962717e-1,
  a54 = 9.24834003261792003115737966543e-1,
  a61 = 3.7037037037037037037037037037e-2, a64 = 1.70828608729473871279604482173e-1,
  a65 = 1.25467687566822425016691814123e-1,
  a71 = 3.7109375e-2, a74 = 1.70252211019544039314978060272e-1,
  a75 = 6.02165389804559606850219397283e-2, a76 = -1.7578125e-2,
  a81 = 3.70920001185047927108779319836e-2, a84 = 1.70383925712239993810214054705e-1,
  a85 = 1.07262030446373284651809199168e-1, a86 = -1.53194377486244017527936158236e-2,
  a87 = 8.27378916381402288758473766002e-3,
  a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
  a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
  a97 = 2.01540675504778934086186788979e1, a98 = -4.34898841810699588477366255144e1,
  a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
  a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
  a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
  a109 = -2.03312017085086261358222928593e-2,
  a111 = -9.3714243008598732571704021658e-1, a114 = 5.18637242884406370830023853209e0,
  a115 = 1.09143734899672957818500254654e0, a116 = -8.14978701074692612513997267357e0,
  a117 = -1.85200656599969598641566180701e1, a118 = 2.27394870993505042818970056734e1,
  a119 = 2.49360555267965238987089396762e0, a1110 = -3.0467644718982195003823669022e0,
  a121 = 2.27331014751653820792359768449e0, a124 = -1.05344954667372501984066689879e1,
  a125 = -2.00087205822486249909675718444e0, a126 = -1.79589318631187989172765950534e1,
  a127 = 2.79488845294199600508499808837e1, a128 = -2.85899827713502369474065508674e0,
  a129 = -8.87285693353062954433549289258e0, a1210 = 1.23605671757943030647266201528e1,
  a1211 = 6.43392746015763530355970484046e-1;
// clang-format on
}  // namespace dop853

/// Adaptive DOP853 stepper over Eigen::VectorXcd states.
///
/// `Rhs` is callable as rhs(double t, const VectorXcd& y, VectorXcd& dydt).
/// The local error test uses the max norm over components of
/// |err_i| / (abs + rel * max(|y_i|, |y_new_i|)), so appending identically
/// zero components does not change the step sequence.
template <class Rhs>
class Dop853 {
 public:
  using Vector = Eigen::VectorXcd;

  Dop853(Rhs rhs, Tolerances tol = {}, StepControl control = {})
      : rhs_(std::move(rhs)), tol_(tol), ctl_(control) {
    if (!(tol_.rel > 0.0) || !(tol_.abs > 0.0)) throw DomainError("Dop853: tolerances must be > 0");
  }

  const Stats& stats() const noexcept { return stats_; }

  /// Advances (t, y) to t_end, landing exactly on t_end.
  void advance(double& t, Vector& y, double t_end) {
    if (t == t_end) return;
    const double direction = t_end > t ? 1.0 : -1.0;
    ensure_storage(y.size());
    if (!have_slope_ || slope_time_ != t) {
      eval(t, y, k1_);
      have_slope_ = true;
    }
    if (h_ == 0.0 || direction * h_ < 0.0) h_ = direction * initial_step(t, y, direction);

    bool last_rejected = false;
    while (direction * (t_end - t) > 0.0) {
      if (stats_.accepted + stats_.rejected >= ctl_.max_steps)
        fail("maximum number of steps exceeded", t);
      double h = direction * std::min(std::abs(h_), ctl_.max_step);
      bool clipped = false;
      // Stretch by a hair rather than leave a rounding-sized sliver before t_end.
      if (direction * (t + h - t_end) >= -1e-8 * std::abs(h)) {
        h = t_end - t;
        clipped = true;
      }
      if (std::abs(h) <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        fail("step-size underflow", t);

      const double err = attempt(t, y, h);
      const double fac11 = std::pow(err, expo1());
      double fac = fac11 / std::pow(fac_old_, ctl_.beta);
      fac = std::clamp(fac / ctl_.safety, 1.0 / ctl_.max_factor, 1.0 / ctl_.min_factor);
      double h_new = h / fac;

      if (err <= 1.0) {
        fac_old_ = std::max(err, 1e-4);
        ++stats_.accepted;
        y.swap(y_new_);
        k1_.swap(k_next_);
        t = clipped ? t_end : t + h;
        slope_time_ = t;
        if (last_rejected) h_new = direction * std::min(std::abs(h_new), std::abs(h));
        // A step shortened to hit an output time should not shrink the proposal.
        if (clipped) h_new = direction * std::max(std::abs(h_new), std::abs(h_));
        h_ = h_new;
        last_rejected = false;
      } else {
        ++stats_.rejected;
        h_ = h / std::min(1.0 / ctl_.min_factor, fac11 / ctl_.safety);
        last_rejected = true;
      }
    }
  }

 private:
  static double expo1() { return 1.0 / 8.0; }

  [[noreturn]] static void fail(const char* what, double t) {
    std::ostringstream os;
    os << "DOP853: " << what << " at t = " << t;
    throw NumericalError(os.str());
  }

  void eval(double t, const Vector& y, Vector& out) {
    rhs_(t, y, out);
    ++stats_.evaluations;
  }

  void ensure_storage(Eigen::Index n) {
    if (k1_.size() == n) return;
    for (Vector* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &k8_, &k9_, &k10_, &k11_, &k12_,
                      &y_stage_, &y_new_, &k_next_})
      v->resize(n);
    have_slope_ = false;
  }

  double initial_step(double t, const Vector& y, double direction) {
    if (ctl_.initial_step > 0.0) return ctl_.initial_step;
    double dnf = 0.0, dny = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sk = tol_.abs + tol_.rel * std::abs(y[i]);
      dnf = std::max(dnf, std::abs(k1_[i]) / sk);
      dny = std::max(dny, std::abs(y[i]) / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, ctl_.max_step);
    y_stage_ = y + direction * h * k1_;
    eval(t + direction * h, y_stage_, k2_);
    double der2 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sk = tol_.abs + tol_.rel * std::abs(y[i]);
      der2 = std::max(der2, std::abs(k2_[i] - k1_[i]) / sk);
    }
    der2 /= h;
    const double der12 = std::max(der2, dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100.0 * h, h1, ctl_.max_step});
  }

  // One trial step of size h from (t, y); fills y_new_ and k_next_ = f(t+h, y_new_)
  // and returns the scaled error norm.
  double attempt(double t, const Vector& y, double h) {
    using namespace dop853;
    y_stage_ = y + h * (a21 * k1_);
    eval(t + c2 * h, y_stage_, k2_);
    y_stage_ = y + h * (a31 * k1_ + a32 * k2_);
    eval(t + c3 * h, y_stage_, k3_);
    y_stage_ = y + h * (a41 * k1_ + a43 * k3_);
    eval(t + c4 * h, y_stage_, k4_);
    y_stage_ = y + h * (a51 * k1_ + a53 * k3_ + a54 * k4_);
    eval(t + c5 * h, y_stage_, k5_);
    y_stage_ = y + h * (a61 * k1_ + a64 * k4_ + a65 * k5_);
    eval(t + c6 * h, y_stage_, k6_);
    y_stage_ = y + h * (a71 * k1_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    eval(t + c7 * h, y_stage_, k7_);
    y_stage_ = y + h * (a81 * k1_ + a84 * k4_ + a85 * k5_ + a86 * k6_ + a87 * k7_);
    eval(t + c8 * h, y_stage_, k8_);
    y_stage_ = y + h * (a91 * k1_ + a94 * k4_ + a95 * k5_ + a96 * k6_ + a97 * k7_ + a98 * k8_);
    eval(t + c9 * h, y_stage_, k9_);
    y_stage_ = y + h * (a101 * k1_ + a104 * k4_ + a105 * k5_ + a106 * k6_ + a107 * k7_ + a108 * k8_ +
                        a109 * k9_);
    eval(t + c10 * h, y_stage_, k10_);
    y_stage_ = y + h * (a111 * k1_ + a114 * k4_ + a115 * k5_ + a116 * k6_ + a117 * k7_ + a118 * k8_ +
                        a119 * k9_ + a1110 * k10_);
    eval(t + c11 * h, y_stage_, k11_);
    y_stage_ = y + h * (a121 * k1_ + a124 * k4_ + a125 * k5_ + a126 * k6_ + a127 * k7_ + a128 * k8_ +
                        a129 * k9_ + a1210 * k10_ + a1211 * k11_);
    eval(t + h, y_stage_, k12_);

    // k5_ is reused for the weighted slope.
    k5_ = b1 * k1_ + b6 * k6_ + b7 * k7_ + b8 * k8_ + b9 * k9_ + b10 * k10_ + b11 * k11_ + b12 * k12_;
    y_new_ = y + h * k5_;

    double err5 = 0.0, err3 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (!std::isfinite(y_new_[i].real()) || !std::isfinite(y_new_[i].imag())) return 1e10;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sk = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      const auto e3 = k5_[i] - bhh1 * k1_[i] - bhh2 * k9_[i] - bhh3 * k12_[i];
      const auto e5 = er1 * k1_[i] + er6 * k6_[i] + er7 * k7_[i] + er8 * k8_[i] + er9 * k9_[i] +
                      er10 * k10_[i] + er11 * k11_[i] + er12 * k12_[i];
      err3 = std::max(err3, std::abs(e3) / sk);
      err5 = std::max(err5, std::abs(e5) / sk);
    }
    double err = 0.0;
    if (err5 > 0.0) err = std::abs(h) * err5 * err5 / std::sqrt(err5 * err5 + 0.01 * err3 * err3);
    if (!std::isfinite(err)) err = 1e10;
    if (err <= 1.0) eval(t + h, y_new_, k_next_);
    return err;
  }

  Rhs rhs_;
  Tolerances tol_;
  StepControl ctl_;
  Stats stats_;

  double h_ = 0.0;
  double fac_old_ = 1e-4;
  bool have_slope_ = false;
  double slope_time_ = std::numeric_limits<double>::quiet_NaN();

  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, k11_, k12_;
  Vector y_stage_, y_new_, k_next_;
};

template <class Rhs>
Dop853<Rhs> make_dop853(Rhs rhs, Tolerances tol = {}, StepControl control = {}) {
  return Dop853<Rhs>(std::move(rhs), tol, control);
}

}  // namespace lzcat::ode
