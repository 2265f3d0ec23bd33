#pragma once

// Explicit Dormand–Prince 8(5,3) integrator with the combined fifth/third
// order error estimate and step control of Hairer's DOP853, templated on the
// scalar so that it runs in quad or MPFR precision.

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Core>
#include <algorithm>
#include <limits>

#include "hhp/errors.hpp"

namespace hhp {

struct StepStatistics {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

// Coefficients are kept as 30-digit strings so they parse at full working
// precision instead of passing through double.
template <class Real>
struct Dop853Tableau {
  Real c2{"0.526001519587677318785587544488E-01"}, c3{"0.789002279381515978178381316732E-01"},
      c4{"0.118350341907227396726757197510E+00"}, c5{"0.281649658092772603273242802490E+00"},
      c6 = Real(1) / 3, c7 = Real(1) / 4, c8 = Real(4) / 13, c9 = Real(127) / 195, c10 = Real(3) / 5,
      c11 = Real(6) / 7;

  Real b1{"5.42937341165687622380535766363E-2"}, b6{"4.45031289275240888144113950566E0"},
      b7{"1.89151789931450038304281599044E0"}, b8{"-5.8012039600105847814672114227E0"},
      b9{"3.1116436695781989440891606237E-1"}, b10{"-1.52160949662516078556178806805E-1"},
      b11{"2.01365400804030348374776537501E-1"}, b12{"4.47106157277725905176885569043E-2"};

  Real a21{"5.26001519587677318785587544488E-2"}, a31{"1.97250569845378994544595329183E-2"},
      a32{"5.91751709536136983633785987549E-2"}, a41{"2.95875854768068491816892993775E-2"},
      a43{"8.87627564304205475450678981324E-2"}, a51{"2.41365134159266685502369798665E-1"},
      a53{"-8.84549479328286085344864962717E-1"}, a54{"9.24834003261792003115737966543E-1"},
      a61 = Real(1) / 27, a64{"1.70828608729473871279604482173E-1"},
      a65{"1.25467687566822425016691814123E-1"}, a71 = Real(19) / 512,
      a74{"1.70252211019544039314978060272E-1"}, a75{"6.02165389804559606850219397283E-2"},
      a76 = Real(-9) / 512;
  Real a81{"3.70920001185047927108779319836E-2"}, a84{"1.70383925712239993810214054705E-1"},
      a85{"1.07262030446373284651809199168E-1"}, a86{"-1.53194377486244017527936158236E-2"},
      a87{"8.27378916381402288758473766002E-3"};
  Real a91{"6.24110958716075717114429577812E-1"}, a94{"-3.36089262944694129406857109825E0"},
      a95{"-8.68219346841726006818189891453E-1"}, a96{"2.75920996994467083049415600797E1"},
      a97{"2.01540675504778934086186788979E1"}, a98{"-4.34898841810699588477366255144E1"};
  Real a101{"4.77662536438264365890433908527E-1"}, a104{"-2.48811461997166764192642586468E0"},
      a105{"-5.90290826836842996371446475743E-1"}, a106{"2.12300514481811942347288949897E1"},
      a107{"1.52792336328824235832596922938E1"}, a108{"-3.32882109689848629194453265587E1"},
      a109{"-2.03312017085086261358222928593E-2"};
  Real a111{"-9.3714243008598732571704021658E-1"}, a114{"5.18637242884406370830023853209E0"},
      a115{"1.09143734899672957818500254654E0"}, a116{"-8.14978701074692612513997267357E0"},
      a117{"-1.85200656599969598641566180701E1"}, a118{"2.27394870993505042818970056734E1"},
      a119{"2.49360555267965238987089396762E0"}, a1110{"-3.0467644718982195003823669022E0"};
  Real a121{"2.27331014751653820792359768449E0"}, a124{"-1.05344954667372501984066689879E1"},
      a125{"-2.00087205822486249909675718444E0"}, a126{"-1.79589318631187989172765950534E1"},
      a127{"2.79488845294199600508499808837E1"}, a128{"-2.85899827713502369474065508674E0"},
      a129{"-8.87285693353062954433549289258E0"}, a1210{"1.23605671757943030647266201528E1"},
      a1211{"6.43392746015763530355970484046E-1"};

  Real bhh1{"0.244094488188976377952755905512E+00"}, bhh2{"0.733846688281611857341361741547E+00"},
      bhh3{"0.220588235294117647058823529412E-01"};
  Real er1{"0.1312004499419488073250102996E-01"}, er6{"-0.1225156446376204440720569753E+01"},
      er7{"-0.4957589496572501915214079952E+00"}, er8{"0.1664377182454986536961530415E+01"},
      er9{"-0.3503288487499736816886487290E+00"}, er10{"0.3341791187130174790297318841E+00"},
      er11{"0.8192320648511571246570742613E-01"}, er12{"-0.2235530786388629525884427845E-01"};
};

template <class Real, int N>
class Dop853 {
 public:
  using State = Eigen::Matrix<Real, N, 1>;

  Dop853(const Real& rtol, const Real& atol, long max_steps = 5'000'000)
      : rtol_(rtol), atol_(atol), max_steps_(max_steps) {}

  const StepStatistics& statistics() const { return stats_; }

  // Advances (t, y) forward to t_end, landing on it exactly. `rhs(t, y, dy)`
  // fills dy; `accept(t, y)` runs after every accepted step and may throw to
  // abort. Consecutive calls continue with the last step size.
  template <class Rhs, class Accept>
  void advance(Rhs&& rhs, Real& t, State& y, const Real& t_end, Accept&& accept) {
    using std::abs;
    if (!(t_end > t)) return;
    if (!started_ || t != t_last_) {
      rhs(t, y, k1_);
      ++stats_.evaluations;
      if (!started_) h_ = initial_step(rhs, t, y, t_end - t);
      started_ = true;
    }
    bool reject = false;
    const Real eps = std::numeric_limits<Real>::epsilon();
    for (;;) {
      if (stats_.accepted + stats_.rejected >= max_steps_)
        throw Error(ErrorKind::StepUnderflow, "step budget exhausted before reaching the end time");
      Real span = t_end - t;
      Real h = h_;
      bool last = false;
      if (h >= span * Real("0.999")) {
        h = span;
        last = true;
      }
      if (h <= 10 * eps * std::max(Real(abs(t)), Real(1)))
        throw Error(ErrorKind::StepUnderflow, "step size fell below the resolution of t");

      Real err = attempt(rhs, t, y, h);
      if (!(err == err)) err = Real(1e10);  // NaN from a blown-up stage
      Real fac11 = pow(err, Real(1) / 8);
      if (err <= 1) {
        ++stats_.accepted;
        t = last ? t_end : t + h;
        y = y_new_;
        rhs(t, y, k1_);
        ++stats_.evaluations;
        t_last_ = t;
        accept(t, y);
        Real fac = std::clamp(Real(fac11 / safe_), Real(Real(1) / 6), Real(3));
        Real h_new = h / fac;
        if (reject) h_new = std::min(h_new, h);
        // A step shortened to hit the end time says little about the scale.
        if (!(last && h < h_)) h_ = h_new;
        if (last) return;
        reject = false;
      } else {
        ++stats_.rejected;
        h_ = h / std::min(Real(3), Real(fac11 / safe_));
        reject = true;
      }
    }
  }

 private:
  template <class Rhs>
  Real initial_step(Rhs& rhs, const Real& t, const State& y, const Real& h_max) {
    using std::abs;
    using std::sqrt;
    Real dnf = 0, dny = 0;
    for (int i = 0; i < N; ++i) {
      Real sk = atol_ + rtol_ * abs(y[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    Real h = (dnf <= Real(1e-10) || dny <= Real(1e-10)) ? Real(1e-6) : sqrt(dny / dnf) * Real("0.01");
    h = std::min(h, h_max);
    State y1 = y + h * k1_;
    State f1;
    rhs(t + h, y1, f1);
    ++stats_.evaluations;
    Real der2 = 0;
    for (int i = 0; i < N; ++i) {
      Real d = (f1[i] - k1_[i]) / (atol_ + rtol_ * abs(y[i]));
      der2 += d * d;
    }
    der2 = sqrt(der2) / h;
    Real der12 = std::max(Real(abs(der2)), Real(sqrt(dnf)));
    Real h1 = der12 <= Real(1e-15) ? std::max(Real(1e-6), Real(h * Real("0.001"))) : Real(pow(Real("0.01") / der12, Real(1) / 8));
    return std::min({Real(100 * h), h1, h_max});
  }

  // One trial step of size h from (t, y); leaves the eighth-order result in
  // y_new_ and returns the scaled error norm.
  template <class Rhs>
  Real attempt(Rhs& rhs, const Real& t, const State& y, const Real& h) {
    using std::abs;
    using std::sqrt;
    const Dop853Tableau<Real>& c = tableau_;
    State w;
    State k2, k3, k4, k5, k6, k7, k8, k9, k10;
    w = y + h * (c.a21 * k1_);
    rhs(t + c.c2 * h, w, k2);
    w = y + h * (c.a31 * k1_ + c.a32 * k2);
    rhs(t + c.c3 * h, w, k3);
    w = y + h * (c.a41 * k1_ + c.a43 * k3);
    rhs(t + c.c4 * h, w, k4);
    w = y + h * (c.a51 * k1_ + c.a53 * k3 + c.a54 * k4);
    rhs(t + c.c5 * h, w, k5);
    w = y + h * (c.a61 * k1_ + c.a64 * k4 + c.a65 * k5);
    rhs(t + c.c6 * h, w, k6);
    w = y + h * (c.a71 * k1_ + c.a74 * k4 + c.a75 * k5 + c.a76 * k6);
    rhs(t + c.c7 * h, w, k7);
    w = y + h * (c.a81 * k1_ + c.a84 * k4 + c.a85 * k5 + c.a86 * k6 + c.a87 * k7);
    rhs(t + c.c8 * h, w, k8);
    w = y + h * (c.a91 * k1_ + c.a94 * k4 + c.a95 * k5 + c.a96 * k6 + c.a97 * k7 + c.a98 * k8);
    rhs(t + c.c9 * h, w, k9);
    w = y + h * (c.a101 * k1_ + c.a104 * k4 + c.a105 * k5 + c.a106 * k6 + c.a107 * k7 + c.a108 * k8 +
                 c.a109 * k9);
    rhs(t + c.c10 * h, w, k10);
    State k11, k12;
    w = y + h * (c.a111 * k1_ + c.a114 * k4 + c.a115 * k5 + c.a116 * k6 + c.a117 * k7 + c.a118 * k8 +
                 c.a119 * k9 + c.a1110 * k10);
    rhs(t + c.c11 * h, w, k11);
    w = y + h * (c.a121 * k1_ + c.a124 * k4 + c.a125 * k5 + c.a126 * k6 + c.a127 * k7 + c.a128 * k8 +
                 c.a129 * k9 + c.a1210 * k10 + c.a1211 * k11);
    rhs(t + h, w, k12);
    stats_.evaluations += 11;

    State incr = c.b1 * k1_ + c.b6 * k6 + c.b7 * k7 + c.b8 * k8 + c.b9 * k9 + c.b10 * k10 + c.b11 * k11 +
                 c.b12 * k12;
    y_new_ = y + h * incr;

    Real err = 0, err2 = 0;
    for (int i = 0; i < N; ++i) {
      Real sk = 1 / (atol_ + rtol_ * std::max(Real(abs(y[i])), Real(abs(y_new_[i]))));
      Real e2 = (incr[i] - c.bhh1 * k1_[i] - c.bhh2 * k9[i] - c.bhh3 * k12[i]) * sk;
      err2 += e2 * e2;
      Real e = (c.er1 * k1_[i] + c.er6 * k6[i] + c.er7 * k7[i] + c.er8 * k8[i] + c.er9 * k9[i] + c.er10 * k10[i] +
                c.er11 * k11[i] + c.er12 * k12[i]) *
               sk;
      err += e * e;
    }
    Real deno = err + Real("0.01") * err2;
    if (deno <= 0) deno = 1;
    return abs(h) * err * sqrt(1 / (deno * N));
  }

  Real rtol_, atol_;
  long max_steps_;
  Dop853Tableau<Real> tableau_;  // per instance: MPFR values take the precision current at construction
  Real safe_{"0.9"};
  Real h_ = 0;
  Real t_last_ = 0;
  bool started_ = false;
  State k1_, y_new_;
  StepStatistics stats_;
};

}  // namespace hhp
