#include "imdrive/sim/serialize.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "imdrive/errors.hpp"

namespace imdrive {
namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
  (void)ec;  // 32 bytes always fit the shortest representation
}

}  // namespace

std::string records_to_csv(const std::vector<StepRecord>& records) {
  std::string out =
      "t,omega_ref,omega_true,omega_hat,psi_ra,psi_rb,psi_ra_hat,psi_rb_hat,"
      "i_a,i_b,i_a_hat,i_b_hat,v_a_cmd,v_b_cmd,Te,TL,Rr_hat,V_lyap\n";
  out.reserve(out.size() + records.size() * 196);
  for (const auto& r : records) {
    const double cols[] = {r.t,        r.omega_ref, r.omega_true, r.omega_hat,
                           r.psi_ra,   r.psi_rb,    r.psi_ra_hat, r.psi_rb_hat,
                           r.i_a,      r.i_b,       r.i_a_hat,    r.i_b_hat,
                           r.v_a_cmd,  r.v_b_cmd,   r.Te,         r.TL,
                           r.Rr_hat,   r.V_lyap};
    bool first = true;
    for (double c : cols) {
      if (!first) out.push_back(',');
      first = false;
      append_number(out, c);
    }
    out.push_back('\n');
  }
  return out;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["speed_rms_error"] = m.speed_rms_error;
  j["speed_max_error"] = m.speed_max_error;
  j["convergence_time"] = m.convergence_time;
  j["flux_rms_error"] = m.flux_rms_error;
  j["Rr_final_error"] = m.Rr_final_error;
  j["stability_classification"] = to_string(m.stability_classification);
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw ConfigError("short write: " + path);
}

}  // namespace imdrive
