#include "sacobra/cobyla.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

namespace sacobra {

namespace {

// The core below follows the structure of Powell's reference implementation
// (subroutines COBYLB and TRSTLP) closely, including its 1-based indexing and
// control flow, so that it can be checked line by line against the original.
// Constraint convention inside the core is con >= 0.

class Mat1 {
 public:
  Mat1(int rows, int cols) : rows_(rows), data_(static_cast<std::size_t>(rows * cols), 0.0) {}
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>((i - 1) + (j - 1) * rows_)]; }

 private:
  int rows_;
  std::vector<double> data_;
};

class Vec1 {
 public:
  explicit Vec1(int n) : data_(static_cast<std::size_t>(std::max(n, 1)), 0.0) {}
  double& operator()(int i) { return data_[static_cast<std::size_t>(i - 1)]; }

 private:
  std::vector<double> data_;
};

class IVec1 {
 public:
  explicit IVec1(int n) : data_(static_cast<std::size_t>(std::max(n, 1)), 0) {}
  int& operator()(int i) { return data_[static_cast<std::size_t>(i - 1)]; }

 private:
  std::vector<int> data_;
};

enum class CoreExit { Normal, MaxFun, Rounding };

// Trust-region LP step. A holds constraint gradients in columns 1..m and minus
// the objective gradient in column m+1; b holds -con at the current vertex.
void trstlp(int n, int m, Mat1& a, Vec1& b, double rho, Vec1& dx, int& ifull, IVec1& iact, Mat1& z, Vec1& zdota,
            Vec1& vmultc, Vec1& sdirn, Vec1& dxnew, Vec1& vmultd) {
  int mcon, nact, icon = 0, nactx = 0, icount, kk, k, kp, kw, kl, iout = 0, isave;
  double resmax, optold, optnew, tot, sp, spabs, acca, accb, temp, alpha, beta, ratio, zdotv, zdvabs, tempa;
  double vsave, dd, sd, ss, stpful, step, resold = 0.0, zdotw, zdwabs, sum, sumabs;

  ifull = 1;
  mcon = m;
  nact = 0;
  resmax = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) z(i, j) = 0.0;
    z(i, i) = 1.0;
    dx(i) = 0.0;
  }
  if (m >= 1) {
    for (k = 1; k <= m; ++k) {
      if (b(k) > resmax) {
        resmax = b(k);
        icon = k;
      }
    }
    for (k = 1; k <= m; ++k) {
      iact(k) = k;
      vmultc(k) = resmax - b(k);
    }
  }
  if (resmax == 0.0) goto L480;
  for (int i = 1; i <= n; ++i) sdirn(i) = 0.0;

  // End the current stage if three consecutive iterations fail to reduce the
  // best objective or to increase the number of active constraints.
L60:
  optold = 0.0;
  icount = 0;
L70:
  if (mcon == m) {
    optnew = resmax;
  } else {
    optnew = 0.0;
    for (int i = 1; i <= n; ++i) optnew -= dx(i) * a(i, mcon);
  }
  if (icount == 0 || optnew < optold) {
    optold = optnew;
    nactx = nact;
    icount = 3;
  } else if (nact > nactx) {
    nactx = nact;
    icount = 3;
  } else {
    --icount;
    if (icount == 0) goto L490;
  }

  // Add constraint IACT(ICON) to the active set, rotating Z so that its last
  // N-NACT-1 columns are orthogonal to the new gradient.
  if (icon <= nact) goto L260;
  kk = iact(icon);
  for (int i = 1; i <= n; ++i) dxnew(i) = a(i, kk);
  tot = 0.0;
  k = n;
  while (k > nact) {
    sp = 0.0;
    spabs = 0.0;
    for (int i = 1; i <= n; ++i) {
      temp = z(i, k) * dxnew(i);
      sp += temp;
      spabs += std::abs(temp);
    }
    acca = spabs + 0.1 * std::abs(sp);
    accb = spabs + 0.2 * std::abs(sp);
    if (spabs >= acca || acca >= accb) sp = 0.0;
    if (tot == 0.0) {
      tot = sp;
    } else {
      kp = k + 1;
      temp = std::sqrt(sp * sp + tot * tot);
      alpha = sp / temp;
      beta = tot / temp;
      tot = temp;
      for (int i = 1; i <= n; ++i) {
        temp = alpha * z(i, k) + beta * z(i, kp);
        z(i, kp) = alpha * z(i, kp) - beta * z(i, k);
        z(i, k) = temp;
      }
    }
    --k;
  }

  if (tot != 0.0) {
    ++nact;
    zdota(nact) = tot;
    vmultc(icon) = vmultc(nact);
    vmultc(nact) = 0.0;
    goto L210;
  }

  // The new gradient is a combination of active gradients: pick a constraint
  // to drop (IOUT) from the multipliers of that combination.
  // A zero gradient with no active constraints cannot be added.
  if (nact == 0) goto L490;
  ratio = -1.0;
  k = nact;
  do {
    zdotv = 0.0;
    zdvabs = 0.0;
    for (int i = 1; i <= n; ++i) {
      temp = z(i, k) * dxnew(i);
      zdotv += temp;
      zdvabs += std::abs(temp);
    }
    acca = zdvabs + 0.1 * std::abs(zdotv);
    accb = zdvabs + 0.2 * std::abs(zdotv);
    if (zdvabs < acca && acca < accb) {
      temp = zdotv / zdota(k);
      if (temp > 0.0 && iact(k) <= m) {
        tempa = vmultc(k) / temp;
        if (ratio < 0.0 || tempa < ratio) {
          ratio = tempa;
          iout = k;
        }
      }
      if (k >= 2) {
        kw = iact(k);
        for (int i = 1; i <= n; ++i) dxnew(i) -= temp * a(i, kw);
      }
      vmultd(k) = temp;
    } else {
      vmultd(k) = 0.0;
    }
    --k;
  } while (k > 0);
  if (ratio < 0.0) goto L490;

  for (k = 1; k <= nact; ++k) vmultc(k) = std::max(0.0, vmultc(k) - ratio * vmultd(k));
  if (iout < nact) {
    isave = iact(iout);
    vsave = vmultc(iout);
    k = iout;
    do {
      kp = k + 1;
      kw = iact(kp);
      sp = 0.0;
      for (int i = 1; i <= n; ++i) sp += z(i, k) * a(i, kw);
      temp = std::sqrt(sp * sp + zdota(kp) * zdota(kp));
      alpha = zdota(kp) / temp;
      beta = sp / temp;
      zdota(kp) = alpha * zdota(k);
      zdota(k) = temp;
      for (int i = 1; i <= n; ++i) {
        temp = alpha * z(i, kp) + beta * z(i, k);
        z(i, kp) = alpha * z(i, k) - beta * z(i, kp);
        z(i, k) = temp;
      }
      iact(k) = kw;
      vmultc(k) = vmultc(kp);
      k = kp;
    } while (k < nact);
    iact(k) = isave;
    vmultc(k) = vsave;
  }
  temp = 0.0;
  for (int i = 1; i <= n; ++i) temp += z(i, nact) * a(i, kk);
  if (temp == 0.0) goto L490;
  zdota(nact) = temp;
  vmultc(icon) = 0.0;
  vmultc(nact) = ratio;

  // Keep the objective as the last active constraint in stage two.
L210:
  iact(icon) = iact(nact);
  iact(nact) = kk;
  if (mcon > m && kk != mcon) {
    k = nact - 1;
    sp = 0.0;
    for (int i = 1; i <= n; ++i) sp += z(i, k) * a(i, kk);
    temp = std::sqrt(sp * sp + zdota(nact) * zdota(nact));
    alpha = zdota(nact) / temp;
    beta = sp / temp;
    zdota(nact) = alpha * zdota(k);
    zdota(k) = temp;
    for (int i = 1; i <= n; ++i) {
      temp = alpha * z(i, nact) + beta * z(i, k);
      z(i, nact) = alpha * z(i, k) - beta * z(i, nact);
      z(i, k) = temp;
    }
    iact(nact) = iact(k);
    iact(k) = kk;
    temp = vmultc(k);
    vmultc(k) = vmultc(nact);
    vmultc(nact) = temp;
  }

  if (mcon > m) goto L320;
  kk = iact(nact);
  temp = 0.0;
  for (int i = 1; i <= n; ++i) temp += sdirn(i) * a(i, kk);
  temp -= 1.0;
  temp /= zdota(nact);
  for (int i = 1; i <= n; ++i) sdirn(i) -= temp * z(i, nact);
  goto L340;

  // Delete constraint IACT(ICON) from the active set.
L260:
  if (icon < nact) {
    isave = iact(icon);
    vsave = vmultc(icon);
    k = icon;
    do {
      kp = k + 1;
      kk = iact(kp);
      sp = 0.0;
      for (int i = 1; i <= n; ++i) sp += z(i, k) * a(i, kk);
      temp = std::sqrt(sp * sp + zdota(kp) * zdota(kp));
      alpha = zdota(kp) / temp;
      beta = sp / temp;
      zdota(kp) = alpha * zdota(k);
      zdota(k) = temp;
      for (int i = 1; i <= n; ++i) {
        temp = alpha * z(i, kp) + beta * z(i, k);
        z(i, kp) = alpha * z(i, k) - beta * z(i, kp);
        z(i, k) = temp;
      }
      iact(k) = kk;
      vmultc(k) = vmultc(kp);
      k = kp;
    } while (k < nact);
    iact(k) = isave;
    vmultc(k) = vsave;
  }
  --nact;

  if (mcon > m) goto L320;
  temp = 0.0;
  for (int i = 1; i <= n; ++i) temp += sdirn(i) * z(i, nact + 1);
  for (int i = 1; i <= n; ++i) sdirn(i) -= temp * z(i, nact + 1);
  goto L340;

L320:
  temp = 1.0 / zdota(nact);
  for (int i = 1; i <= n; ++i) sdirn(i) = temp * z(i, nact);

  // Step to the trust-region boundary, or the step that zeroes RESMAX.
L340:
  dd = rho * rho;
  sd = 0.0;
  ss = 0.0;
  for (int i = 1; i <= n; ++i) {
    if (std::abs(dx(i)) >= 1.0e-6 * rho) dd -= dx(i) * dx(i);
    sd += dx(i) * sdirn(i);
    ss += sdirn(i) * sdirn(i);
  }
  if (dd <= 0.0) goto L490;
  temp = std::sqrt(ss * dd);
  if (std::abs(sd) >= 1.0e-6 * temp) temp = std::sqrt(ss * dd + sd * sd);
  stpful = dd / (temp + sd);
  step = stpful;
  if (mcon == m) {
    acca = step + 0.1 * resmax;
    accb = step + 0.2 * resmax;
    if (step >= acca || acca >= accb) goto L480;
    step = std::min(step, resmax);
  }

  for (int i = 1; i <= n; ++i) dxnew(i) = dx(i) + step * sdirn(i);
  if (mcon == m) {
    resold = resmax;
    resmax = 0.0;
    for (k = 1; k <= nact; ++k) {
      kk = iact(k);
      temp = b(kk);
      for (int i = 1; i <= n; ++i) temp -= a(i, kk) * dxnew(i);
      resmax = std::max(resmax, temp);
    }
  }

  // Multipliers that would hold if DX became DXNEW.
  k = nact;
  for (;;) {
    zdotw = 0.0;
    zdwabs = 0.0;
    for (int i = 1; i <= n; ++i) {
      temp = z(i, k) * dxnew(i);
      zdotw += temp;
      zdwabs += std::abs(temp);
    }
    acca = zdwabs + 0.1 * std::abs(zdotw);
    accb = zdwabs + 0.2 * std::abs(zdotw);
    if (zdwabs >= acca || acca >= accb) zdotw = 0.0;
    vmultd(k) = zdotw / zdota(k);
    if (k >= 2) {
      kk = iact(k);
      for (int i = 1; i <= n; ++i) dxnew(i) -= vmultd(k) * a(i, kk);
      --k;
      continue;
    }
    break;
  }
  if (mcon > m) vmultd(nact) = std::max(0.0, vmultd(nact));

  for (int i = 1; i <= n; ++i) dxnew(i) = dx(i) + step * sdirn(i);
  if (mcon > nact) {
    kl = nact + 1;
    for (k = kl; k <= mcon; ++k) {
      kk = iact(k);
      sum = resmax - b(kk);
      sumabs = resmax + std::abs(b(kk));
      for (int i = 1; i <= n; ++i) {
        temp = a(i, kk) * dxnew(i);
        sum += temp;
        sumabs += std::abs(temp);
      }
      acca = sumabs + 0.1 * std::abs(sum);
      accb = sumabs + 0.2 * std::abs(sum);
      if (sumabs >= acca || acca >= accb) sum = 0.0;
      vmultd(k) = sum;
    }
  }

  ratio = 1.0;
  icon = 0;
  for (k = 1; k <= mcon; ++k) {
    if (vmultd(k) < 0.0) {
      temp = vmultc(k) / (vmultc(k) - vmultd(k));
      if (temp < ratio) {
        ratio = temp;
        icon = k;
      }
    }
  }

  temp = 1.0 - ratio;
  for (int i = 1; i <= n; ++i) dx(i) = temp * dx(i) + ratio * dxnew(i);
  for (k = 1; k <= mcon; ++k) vmultc(k) = std::max(0.0, temp * vmultc(k) + ratio * vmultd(k));
  if (mcon == m) resmax = resold + ratio * (resmax - resold);

  if (icon > 0) goto L70;
  if (step == stpful) return;
L480:
  mcon = m + 1;
  icon = mcon;
  iact(mcon) = mcon;
  vmultc(mcon) = 0.0;
  goto L60;

L490:
  if (mcon == m) goto L480;
  ifull = 0;
}

using CoreFunction = std::function<double(Vec1& x, Vec1& con)>;

// Returns through `x` the last point the core considers current; the caller
// tracks the best evaluated point separately.
CoreExit cobylb(int n, int m, Vec1& x, double rhobeg, double rhoend, int maxfun, int& nfvals,
                const CoreFunction& calcfc, const std::function<void(double)>& on_eval) {
  const int np = n + 1;
  const int mp = m + 1;
  const int mpp = m + 2;
  const double alpha = 0.25;
  const double beta = 2.1;
  const double gamma = 0.5;
  const double delta = 1.1;

  Mat1 sim(n, np), simi(n, n), datmat(mpp, np), a(n, mp), z(n, n);
  Vec1 con(mpp), vsig(n), veta(n), sigbar(n), dx(n), w(n), zdota(n), vmc(mp), sdirn(n), dxnew(n), vmd(mp);
  IVec1 iact(mp);

  double rho = rhobeg;
  double parmu = 0.0;
  double f = 0.0, resmax, temp, tempa, phimin, error, parsig, pareta, wsig, weta, cvmaxp, cvmaxm, dxsign, sum;
  double resnew, barmu, prerec = 0.0, prerem = 0.0, phi, vmold, vmnew, trured, ratio, edgmax, denom, cmin = 0.0,
                         cmax = 0.0;
  int jdrop = np, ibrnch = 0, nbest, iflag = 0, ifull = 0, l;
  CoreExit exit = CoreExit::Normal;

  nfvals = 0;
  temp = 1.0 / rho;
  for (int i = 1; i <= n; ++i) {
    sim(i, np) = x(i);
    for (int j = 1; j <= n; ++j) {
      sim(i, j) = 0.0;
      simi(i, j) = 0.0;
    }
    sim(i, i) = rho;
    simi(i, i) = temp;
  }

L40:
  if (nfvals >= maxfun && nfvals > 0) {
    exit = CoreExit::MaxFun;
    goto L600;
  }
  ++nfvals;
  f = calcfc(x, con);
  resmax = 0.0;
  for (int k = 1; k <= m; ++k) resmax = std::max(resmax, -con(k));
  if (on_eval) on_eval(rho);
  con(mp) = f;
  con(mpp) = resmax;
  if (ibrnch == 1) goto L440;

  for (int k = 1; k <= mpp; ++k) datmat(k, jdrop) = con(k);
  if (nfvals <= np) {
    // Initial simplex: swap in the new vertex if it is better than the pole.
    if (jdrop <= n) {
      if (datmat(mp, np) <= f) {
        x(jdrop) = sim(jdrop, np);
      } else {
        sim(jdrop, np) = x(jdrop);
        for (int k = 1; k <= mpp; ++k) {
          datmat(k, jdrop) = datmat(k, np);
          datmat(k, np) = con(k);
        }
        for (int k = 1; k <= jdrop; ++k) {
          sim(jdrop, k) = -rho;
          temp = 0.0;
          for (int i = k; i <= jdrop; ++i) temp -= simi(i, k);
          simi(jdrop, k) = temp;
        }
      }
    }
    if (nfvals <= n) {
      jdrop = nfvals;
      x(jdrop) += rho;
      goto L40;
    }
  }
  ibrnch = 1;

L140:
  // Optimal vertex of the current simplex.
  phimin = datmat(mp, np) + parmu * datmat(mpp, np);
  nbest = np;
  for (int j = 1; j <= n; ++j) {
    temp = datmat(mp, j) + parmu * datmat(mpp, j);
    if (temp < phimin) {
      nbest = j;
      phimin = temp;
    } else if (temp == phimin && parmu == 0.0) {
      if (datmat(mpp, j) < datmat(mpp, nbest)) nbest = j;
    }
  }
  if (nbest <= n) {
    for (int i = 1; i <= mpp; ++i) {
      temp = datmat(i, np);
      datmat(i, np) = datmat(i, nbest);
      datmat(i, nbest) = temp;
    }
    for (int i = 1; i <= n; ++i) {
      temp = sim(i, nbest);
      sim(i, nbest) = 0.0;
      sim(i, np) += temp;
      tempa = 0.0;
      for (int k = 1; k <= n; ++k) {
        sim(i, k) -= temp;
        tempa -= simi(k, i);
      }
      simi(nbest, i) = tempa;
    }
  }

  // Bail out if SIMI is no longer a good inverse of SIM.
  error = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      temp = (i == j) ? -1.0 : 0.0;
      for (int k = 1; k <= n; ++k) temp += simi(i, k) * sim(k, j);
      error = std::max(error, std::abs(temp));
    }
  }
  if (!(error <= 0.1)) {
    exit = CoreExit::Rounding;
    goto L600;
  }

  // Linear models: constraint gradients, then minus the objective gradient.
  for (int k = 1; k <= mp; ++k) {
    con(k) = -datmat(k, np);
    for (int j = 1; j <= n; ++j) w(j) = datmat(k, j) + con(k);
    for (int i = 1; i <= n; ++i) {
      temp = 0.0;
      for (int j = 1; j <= n; ++j) temp += w(j) * simi(j, i);
      if (k == mp) temp = -temp;
      a(i, k) = temp;
    }
  }

  // Simplex acceptability.
  iflag = 1;
  parsig = alpha * rho;
  pareta = beta * rho;
  for (int j = 1; j <= n; ++j) {
    wsig = 0.0;
    weta = 0.0;
    for (int i = 1; i <= n; ++i) {
      wsig += simi(j, i) * simi(j, i);
      weta += sim(i, j) * sim(i, j);
    }
    vsig(j) = 1.0 / std::sqrt(wsig);
    veta(j) = std::sqrt(weta);
    if (vsig(j) < parsig || veta(j) > pareta) iflag = 0;
  }

  if (ibrnch == 1 || iflag == 1) goto L370;

  // Replace a vertex to restore acceptability.
  jdrop = 0;
  temp = pareta;
  for (int j = 1; j <= n; ++j) {
    if (veta(j) > temp) {
      jdrop = j;
      temp = veta(j);
    }
  }
  if (jdrop == 0) {
    for (int j = 1; j <= n; ++j) {
      if (vsig(j) < temp) {
        jdrop = j;
        temp = vsig(j);
      }
    }
  }
  temp = gamma * rho * vsig(jdrop);
  for (int i = 1; i <= n; ++i) dx(i) = temp * simi(jdrop, i);
  cvmaxp = 0.0;
  cvmaxm = 0.0;
  sum = 0.0;
  for (int k = 1; k <= mp; ++k) {
    sum = 0.0;
    for (int i = 1; i <= n; ++i) sum += a(i, k) * dx(i);
    if (k < mp) {
      temp = datmat(k, np);
      cvmaxp = std::max(cvmaxp, -sum - temp);
      cvmaxm = std::max(cvmaxm, sum - temp);
    }
  }
  dxsign = 1.0;
  if (parmu * (cvmaxp - cvmaxm) > sum + sum) dxsign = -1.0;

  temp = 0.0;
  for (int i = 1; i <= n; ++i) {
    dx(i) *= dxsign;
    sim(i, jdrop) = dx(i);
    temp += simi(jdrop, i) * dx(i);
  }
  for (int i = 1; i <= n; ++i) simi(jdrop, i) /= temp;
  for (int j = 1; j <= n; ++j) {
    if (j != jdrop) {
      temp = 0.0;
      for (int i = 1; i <= n; ++i) temp += simi(j, i) * dx(i);
      for (int i = 1; i <= n; ++i) simi(j, i) -= temp * simi(jdrop, i);
    }
    x(j) = sim(j, np) + dx(j);
  }
  goto L40;

L370:
  trstlp(n, m, a, con, rho, dx, ifull, iact, z, zdota, vmc, sdirn, dxnew, vmd);
  if (ifull == 0) {
    temp = 0.0;
    for (int i = 1; i <= n; ++i) temp += dx(i) * dx(i);
    if (temp < 0.25 * rho * rho) {
      ibrnch = 1;
      goto L550;
    }
  }

  // Predicted change of objective and maximum violation.
  resnew = 0.0;
  con(mp) = 0.0;
  sum = 0.0;
  for (int k = 1; k <= mp; ++k) {
    sum = con(k);
    for (int i = 1; i <= n; ++i) sum -= a(i, k) * dx(i);
    if (k < mp) resnew = std::max(resnew, sum);
  }

  barmu = 0.0;
  prerec = datmat(mpp, np) - resnew;
  if (prerec > 0.0) barmu = sum / prerec;
  if (parmu < 1.5 * barmu) {
    parmu = 2.0 * barmu;
    phi = datmat(mp, np) + parmu * datmat(mpp, np);
    for (int j = 1; j <= n; ++j) {
      temp = datmat(mp, j) + parmu * datmat(mpp, j);
      if (temp < phi) goto L140;
      if (temp == phi && parmu == 0.0) {
        if (datmat(mpp, j) < datmat(mpp, np)) goto L140;
      }
    }
  }
  prerem = parmu * prerec - sum;

  for (int i = 1; i <= n; ++i) x(i) = sim(i, np) + dx(i);
  ibrnch = 1;
  goto L40;

L440:
  vmold = datmat(mp, np) + parmu * datmat(mpp, np);
  vmnew = f + parmu * resmax;
  trured = vmold - vmnew;
  if (parmu == 0.0 && f == datmat(mp, np)) {
    prerem = prerec;
    trured = datmat(mpp, np) - resmax;
  }

  // Choose the vertex to replace; mandatory when TRURED is positive.
  ratio = 0.0;
  if (trured <= 0.0) ratio = 1.0;
  jdrop = 0;
  for (int j = 1; j <= n; ++j) {
    temp = 0.0;
    for (int i = 1; i <= n; ++i) temp += simi(j, i) * dx(i);
    temp = std::abs(temp);
    if (temp > ratio) {
      jdrop = j;
      ratio = temp;
    }
    sigbar(j) = temp * vsig(j);
  }

  edgmax = delta * rho;
  l = 0;
  for (int j = 1; j <= n; ++j) {
    if (sigbar(j) >= parsig || sigbar(j) >= vsig(j)) {
      temp = veta(j);
      if (trured > 0.0) {
        temp = 0.0;
        for (int i = 1; i <= n; ++i) temp += (dx(i) - sim(i, j)) * (dx(i) - sim(i, j));
        temp = std::sqrt(temp);
      }
      if (temp > edgmax) {
        l = j;
        edgmax = temp;
      }
    }
  }
  if (l > 0) jdrop = l;
  if (jdrop == 0) goto L550;

  temp = 0.0;
  for (int i = 1; i <= n; ++i) {
    sim(i, jdrop) = dx(i);
    temp += simi(jdrop, i) * dx(i);
  }
  for (int i = 1; i <= n; ++i) simi(jdrop, i) /= temp;
  for (int j = 1; j <= n; ++j) {
    if (j != jdrop) {
      temp = 0.0;
      for (int i = 1; i <= n; ++i) temp += simi(j, i) * dx(i);
      for (int i = 1; i <= n; ++i) simi(j, i) -= temp * simi(jdrop, i);
    }
  }
  for (int k = 1; k <= mpp; ++k) datmat(k, jdrop) = con(k);

  if (trured > 0.0 && trured >= 0.1 * prerem) goto L140;

L550:
  if (iflag == 0) {
    ibrnch = 0;
    goto L140;
  }

  if (rho > rhoend) {
    rho *= 0.5;
    if (rho <= 1.5 * rhoend) rho = rhoend;
    if (parmu > 0.0) {
      denom = 0.0;
      for (int k = 1; k <= mp; ++k) {
        cmin = datmat(k, np);
        cmax = cmin;
        for (int i = 1; i <= n; ++i) {
          cmin = std::min(cmin, datmat(k, i));
          cmax = std::max(cmax, datmat(k, i));
        }
        if (k <= m && cmin < 0.5 * cmax) {
          temp = std::max(cmax, 0.0) - cmin;
          denom = (denom <= 0.0) ? temp : std::min(denom, temp);
        }
      }
      if (denom == 0.0) {
        parmu = 0.0;
      } else if (cmax - cmin < parmu * denom) {
        parmu = (cmax - cmin) / denom;
      }
    }
    goto L140;
  }
  exit = CoreExit::Normal;
  if (ifull == 1) return exit;

L600:
  for (int i = 1; i <= n; ++i) x(i) = sim(i, np);
  return exit;
}

double box_violation(const Vector& x, const Vector& lower, const Vector& upper) {
  double v = 0.0;
  for (Index i = 0; i < x.size(); ++i) v = std::max({v, lower[i] - x[i], x[i] - upper[i]});
  return v;
}

}  // namespace

bool merit_order(const SubsolverResult& a, const SubsolverResult& b) {
  const bool fa = a.max_violation <= kMeritFeasibilityTol;
  const bool fb = b.max_violation <= kMeritFeasibilityTol;
  if (fa != fb) return fa;
  if (fa) return a.objective_value < b.objective_value;
  return a.max_violation < b.max_violation;
}

SubsolverResult minimize(const SubproblemSpec& spec) {
  const Index d = spec.start.size();
  if (d == 0) throw ConfigError("minimize: empty start point");
  if (spec.lower.size() != d || spec.upper.size() != d) throw ConfigError("minimize: bounds do not match start");
  if (!spec.evaluate) throw ConfigError("minimize: missing evaluator");
  if (spec.max_inner_evals < 50 * d) throw ConfigError("minimize: max_inner_evals must be at least 50*d");
  if (box_violation(spec.start, spec.lower, spec.upper) > 0.0) throw ConfigError("minimize: start outside bounds");
  if (!(spec.initial_radius > 0.0) || !(spec.convergence_tol > 0.0) ||
      spec.convergence_tol > spec.initial_radius) {
    throw ConfigError("minimize: need 0 < convergence_tol <= initial_radius");
  }

  const int n = static_cast<int>(d);
  const int mc = static_cast<int>(spec.num_constraints);
  const int m = mc + 2 * n;

  Vector xv(d);
  Vector cv(spec.num_constraints);
  SubsolverResult best;
  best.x = spec.start;
  Index evals = 0;

  auto evaluate = [&](const Vector& x, double& f, double& viol) {
    cv.setZero();
    f = spec.evaluate(x, cv);
    ++evals;
    if (!std::isfinite(f) || !cv.allFinite()) throw NonFiniteSurrogate(x);
    viol = box_violation(x, spec.lower, spec.upper);
    if (cv.size() > 0) viol = std::max(viol, cv.maxCoeff());
    SubsolverResult candidate{x, f, viol, 0, SubsolverStatus::Stalled};
    if (evals == 1 || merit_order(candidate, best)) {
      best.x = x;
      best.objective_value = f;
      best.max_violation = viol;
    }
  };

  const CoreFunction calcfc = [&](Vec1& x, Vec1& con) {
    for (int i = 1; i <= n; ++i) xv[i - 1] = x(i);
    double f = 0.0;
    double viol = 0.0;
    evaluate(xv, f, viol);
    for (int k = 1; k <= mc; ++k) con(k) = -cv[k - 1];
    for (int i = 1; i <= n; ++i) {
      con(mc + i) = xv[i - 1] - spec.lower[i - 1];
      con(mc + n + i) = spec.upper[i - 1] - xv[i - 1];
    }
    return f;
  };
  std::function<void(double)> on_eval;
  if (spec.trace != nullptr) {
    on_eval = [&](double rho) {
      *spec.trace << evals << ',' << rho << ',' << best.objective_value << ',' << best.max_violation << '\n';
    };
  }

  Vec1 x(n);
  for (int i = 1; i <= n; ++i) x(i) = spec.start[i - 1];
  // One evaluation is held back for the clipped final point.
  const int maxfun = static_cast<int>(spec.max_inner_evals) - 1;
  int nfvals = 0;
  const CoreExit exit = cobylb(n, m, x, spec.initial_radius, spec.convergence_tol, maxfun, nfvals, calcfc, on_eval);

  switch (exit) {
    case CoreExit::Normal: best.status = SubsolverStatus::Converged; break;
    case CoreExit::MaxFun: best.status = SubsolverStatus::BudgetExhausted; break;
    case CoreExit::Rounding: best.status = SubsolverStatus::Stalled; break;
  }

  Vector clipped = best.x.cwiseMax(spec.lower).cwiseMin(spec.upper);
  if (clipped != best.x) {
    double f = 0.0;
    double viol = 0.0;
    evaluate(clipped, f, viol);
    // The clipped point replaces the incumbent even when slightly worse.
    best.x = clipped;
    best.objective_value = f;
    best.max_violation = viol;
  }
  best.inner_evals_used = evals;
  return best;
}

}  // namespace sacobra
