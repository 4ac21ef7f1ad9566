#include "nls/runio.hpp"

#include <sys/stat.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nls {

std::string content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ensure_dir(const std::string& path) {
  std::string acc;
  for (std::size_t i = 0; i <= path.size(); ++i) {
    if (i == path.size() || path[i] == '/') {
      if (!acc.empty() && acc != ".") mkdir(acc.c_str(), 0755);
    }
    if (i < path.size()) acc += path[i];
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_text: cannot open " + path);
  os << text;
}

std::string read_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_text: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_conserved_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(16);
  os << "t,M,P_x,P_y,E,lambda_est\n";
  for (const auto& s : traj.series)
    os << s.t << "," << s.c.mass << "," << s.c.momentum[0] << ","
       << s.c.momentum[1] << "," << s.c.energy << "," << s.lambda_est << "\n";
}

void write_modulation_csv(const std::string& path, const ModulationSeries& series) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(16);
  os << "t,s,lambda,b,x1,x2,gamma,res1,res2,res3,res4,res5,eps_l2,grad_ieps,"
        "f1,b_s,lam_s_over_lam,exp_mass\n";
  for (const auto& fr : series.frames) {
    const auto& st = fr.state;
    os << fr.t << "," << fr.s << "," << st.lambda << "," << st.b << ","
       << st.xc[0] << "," << st.xc[1] << "," << st.gamma;
    for (int k = 0; k < 5; ++k) os << "," << st.residuals[k];
    os << "," << st.eps_l2 << "," << fr.grad_ieps << "," << fr.f1 << ","
       << fr.b_s << "," << fr.lam_s_over_lam << "," << fr.exp_mass << "\n";
  }
}

void write_imethod_csv(const std::string& path,
                       const AlmostConservationReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(16);
  os << "t,lambda,N,E_IN_a,xi_over_lambda2,combo,P_IN_a\n";
  for (const auto& r : report.rows)
    os << r.t << "," << r.lambda << "," << r.N << "," << r.energy_mod << ","
       << r.xi_over_l2 << "," << r.combo << "," << r.momentum << "\n";
}

}  // namespace nls
