// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vlcsee {

namespace {
constexpr long double kPiL = 3.14159265358979323846264338327950288L;
}

double cos_deg(double deg) {
  return static_cast<double>(cosl(static_cast<long double>(deg) * kPiL / 180.0L));
}

double sin_deg(double deg) {
  return static_cast<double>(sinl(static_cast<long double>(deg) * kPiL / 180.0L));
}

double lambertian_order_from_cos(double cos_omega) {
  if (!(cos_omega > 0.0) || !(cos_omega < 1.0)) {
    throw std::domain_error("lambertian_order: cos(omega_half) must lie in (0, 1)");
  }
  return -1.0 / std::log2(cos_omega);
}

double lambertian_order(double omega_half_rad) {
  return lambertian_order_from_cos(std::cos(omega_half_rad));
}

OpticalParams OpticalParams::from_degrees(double g_of, double kappa, double psi_fov_deg,
                                          double omega_half_deg, double area_pd, double rho) {
  OpticalParams p;
  p.g_of = g_of;
  p.kappa = kappa;
  p.psi_fov = deg_to_rad(psi_fov_deg);
  p.omega_half = deg_to_rad(omega_half_deg);
  p.area_pd = area_pd;
  p.rho = rho;
  // cos_deg keeps dyadic-degree half-angles exact (60 deg -> m = 1).
  p.lambert_m = lambertian_order_from_cos(cos_deg(omega_half_deg));
  const double s = std::sin(p.psi_fov);
  p.concentrator = kappa * kappa / (s * s);
  p.cos_psi_fov = std::cos(p.psi_fov);
  p.validate();
  return p;
}

OpticalParams OpticalParams::from_radians(double g_of, double kappa, double psi_fov_rad,
                                          double omega_half_rad, double area_pd, double rho) {
  OpticalParams p;
  p.g_of = g_of;
  p.kappa = kappa;
  p.psi_fov = psi_fov_rad;
  p.omega_half = omega_half_rad;
  p.area_pd = area_pd;
  p.rho = rho;
  p.lambert_m = lambertian_order(omega_half_rad);
  const double s = std::sin(psi_fov_rad);
  p.concentrator = kappa * kappa / (s * s);
  p.cos_psi_fov = std::cos(psi_fov_rad);
  p.validate();
  return p;
}

void OpticalParams::validate() const {
  std::ostringstream problems;
  if (!(area_pd > 0)) problems << "area_pd must be positive; ";
  if (!(psi_fov > 0) || psi_fov > M_PI / 2) problems << "psi_fov must lie in (0, pi/2]; ";
  if (!(omega_half > 0) || !(omega_half < M_PI / 2)) problems << "omega_half must lie in (0, pi/2); ";
  if (rho < 0 || rho > 1) problems << "rho must lie in [0, 1]; ";
  const std::string s = problems.str();
  if (!s.empty()) throw std::invalid_argument("OpticalParams: " + s);
}

double concentrator_gain(double psi_rad, const OpticalParams& params) {
  if (psi_rad < 0) return 0.0;
  // cos comparison is monotone on [0, pi]; boundary inclusive.
  return std::cos(psi_rad) >= params.cos_psi_fov ? params.concentrator : 0.0;
}

double los_gain(const Vec3& tx_pos, const Vec3& tx_normal, const Vec3& rx_pos,
                const Vec3& rx_normal, const OpticalParams& params) {
  const Vec3 delta = rx_pos - tx_pos;
  const double d = delta.norm();
  if (d == 0.0) throw std::invalid_argument("los_gain: transmitter and receiver coincide");
  const double cos_phi = tx_normal.dot(delta) / d;
  const double cos_psi = rx_normal.dot(-delta) / d;
  if (cos_phi <= 0.0 || cos_psi <= 0.0) return 0.0;
  if (cos_psi < params.cos_psi_fov) return 0.0;
  const double m = params.lambert_m;
  return (m + 1.0) * params.area_pd / (2.0 * M_PI * d * d) * std::pow(cos_phi, m) * cos_psi *
         params.g_of * params.concentrator;
}

double nlos_element_gain(const Vec3& led_pos, const Vec3& led_normal, const Vec3& element_pos,
                         const Vec3& element_normal, const Vec3& rx_pos, const Vec3& rx_normal,
                         const OpticalParams& params) {
  const Vec3 to_element = element_pos - led_pos;
  const double d1 = to_element.norm();
  if (d1 == 0.0) throw std::invalid_argument("nlos_element_gain: LED and element coincide");
  const Vec3 to_rx = rx_pos - element_pos;
  const double d2 = to_rx.norm();
  if (d2 == 0.0) throw std::invalid_argument("nlos_element_gain: element and receiver coincide");

  const double cos_phi = led_normal.dot(to_element) / d1;
  const double cos_psi = rx_normal.dot(-to_rx) / d2;
  if (cos_phi <= 0.0 || cos_psi <= 0.0) return 0.0;
  if (cos_psi < params.cos_psi_fov) return 0.0;
  // Mirror element: both endpoints must lie on its front side.
  if (element_normal.dot(-to_element) <= 0.0 || element_normal.dot(to_rx) <= 0.0) return 0.0;

  const double m = params.lambert_m;
  const double path = d1 + d2;
  return params.rho * (m + 1.0) * params.area_pd / (2.0 * M_PI * path * path) *
         std::pow(cos_phi, m) * cos_psi * params.g_of * params.concentrator;
}

void Scene::validate() const {
  std::ostringstream problems;
  if (leds.empty()) problems << "at least one LED required; ";
  if (lus.empty()) problems << "at least one user required; ";
  auto in_room = [&](const Vec3& p) {
    return p.x() >= 0 && p.x() <= room.x() && p.y() >= 0 && p.y() <= room.y() && p.z() >= 0 &&
           p.z() <= room.z() && p.allFinite();
  };
  auto check_all = [&](const std::vector<Vec3>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!in_room(v[i])) problems << what << " " << i + 1 << " outside room bounds; ";
    }
  };
  check_all(leds, "LED");
  check_all(irs_elements, "element");
  check_all(lus, "user");
  if (!in_room(eve)) problems << "eavesdropper outside room bounds; ";
  auto unit = [](const Vec3& n) { return std::abs(n.norm() - 1.0) < 1e-9; };
  if (!unit(led_normal) || !unit(rx_normal) || !unit(irs_normal)) {
    problems << "surface normals must be unit length; ";
  }
  const std::string s = problems.str();
  if (!s.empty()) throw std::invalid_argument("Scene: " + s);
}

ChannelSet build_channel_set(const Scene& scene, const OpticalParams& params) {
  scene.validate();
  const int num_leds = scene.num_leds();
  const int num_elems = scene.num_elements();
  const int num_lus = scene.num_lus();

  ChannelSet out;
  out.h_los_lu.resize(num_lus, num_leds);
  out.h_los_eve.resize(num_leds);
  out.h_nlos_eve = Vector::Zero(num_leds);
  out.g_nlos.assign(num_leds, Matrix::Zero(num_elems, num_lus));

  for (int l = 0; l < num_leds; ++l) {
    for (int k = 0; k < num_lus; ++k) {
      out.h_los_lu(k, l) = los_gain(scene.leds[l], scene.led_normal, scene.lus[k], scene.rx_normal, params);
    }
    out.h_los_eve(l) = los_gain(scene.leds[l], scene.led_normal, scene.eve, scene.rx_normal, params);
    for (int n = 0; n < num_elems; ++n) {
      for (int k = 0; k < num_lus; ++k) {
        try {
          out.g_nlos[l](n, k) =
              nlos_element_gain(scene.leds[l], scene.led_normal, scene.irs_elements[n],
                                scene.irs_normal, scene.lus[k], scene.rx_normal, params);
        } catch (const std::invalid_argument& e) {
          std::ostringstream msg;
          msg << e.what() << " (led " << l + 1 << ", element " << n + 1 << ", user " << k + 1 << ")";
          throw std::invalid_argument(msg.str());
        }
      }
    }
  }
  return out;
}

Matrix effective_channel(const ChannelSet& channels, const AlignmentState& alignment) {
  const int num_lus = channels.num_lus();
  const int num_leds = channels.num_leds();
  const int num_elems = channels.num_elements();
  if (alignment.num_leds != num_leds || alignment.num_lus != num_lus ||
      alignment.num_elements() != num_elems) {
    throw std::invalid_argument("effective_channel: alignment dimensions do not match channel set");
  }
  Matrix h = channels.h_los_lu;
  for (int n = 0; n < num_elems; ++n) {
    const auto pair = alignment.row_pair(n);
    if (!pair) continue;
    const int l = pair->led - 1;
    const int k = pair->lu - 1;
    h(k, l) += channels.g_nlos[l](n, k);
  }
  return h;
}

}  // namespace vlcsee
