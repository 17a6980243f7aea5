// SPDX-License-Identifier: Apache-2.0
//
// Optical channel model for an indoor LED downlink with a mirror-array
// reflector: Lambertian line-of-sight gains, single-bounce specular
// reflection gains, and the effective per-user channel under a given
// element-to-link assignment.
#pragma once

#include <string>
#include <vector>

#include "vlcsee/alignment.hpp"
#include "vlcsee/linalg.hpp"

namespace vlcsee {

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

// Degree-native cosine/sine, evaluated in extended precision so that
// dyadic-degree inputs (30, 60, 90, ...) round to their exact values.
double cos_deg(double deg);
double sin_deg(double deg);

// m = -1 / log2(cos w). Throws std::domain_error unless cos(w) is in (0,1).
double lambertian_order(double omega_half_rad);
double lambertian_order_from_cos(double cos_omega);

struct OpticalParams {
  double g_of = 1.0;        // optical filter gain
  double kappa = 1.5;       // concentrator refractive index
  double psi_fov = 0.0;     // receiver field-of-view half-angle [rad]
  double omega_half = 0.0;  // transmitter half-intensity angle [rad]
  double area_pd = 1e-4;    // photo-detector area [m^2]
  double rho = 0.9;         // reflector element efficiency

  // Derived once at construction.
  double lambert_m = 1.0;    // Lambertian order
  double concentrator = 0.0; // kappa^2 / sin^2(psi_fov)
  double cos_psi_fov = 0.0;  // field-of-view gate threshold

  static OpticalParams from_degrees(double g_of, double kappa, double psi_fov_deg,
                                    double omega_half_deg, double area_pd, double rho);
  static OpticalParams from_radians(double g_of, double kappa, double psi_fov_rad,
                                    double omega_half_rad, double area_pd, double rho);

  void validate() const;  // throws std::invalid_argument listing violations
};

// kappa^2 / sin^2(psi_fov) when 0 <= psi <= psi_fov, else 0.
double concentrator_gain(double psi_rad, const OpticalParams& params);

// Lambertian line-of-sight gain between a transmitter and a receiver.
// Returns 0 when either surface faces away or the receiver is outside its
// field of view. Throws std::invalid_argument when tx and rx coincide.
double los_gain(const Vec3& tx_pos, const Vec3& tx_normal, const Vec3& rx_pos,
                const Vec3& rx_normal, const OpticalParams& params);

// Single-bounce specular gain LED -> element -> receiver with combined
// path length (d1 + d2). The element acts as a mirror: gain is 0 when the
// LED or the receiver lies behind the element plane.
double nlos_element_gain(const Vec3& led_pos, const Vec3& led_normal, const Vec3& element_pos,
                         const Vec3& element_normal, const Vec3& rx_pos, const Vec3& rx_normal,
                         const OpticalParams& params);

struct Scene {
  std::vector<Vec3> leds;
  std::vector<Vec3> irs_elements;
  std::vector<Vec3> lus;
  Vec3 eve = Vec3::Zero();
  Vec3 led_normal = Vec3(0, 0, -1);  // ceiling LEDs face down
  Vec3 rx_normal = Vec3(0, 0, 1);    // receivers face up
  Vec3 irs_normal = Vec3(1, 0, 0);   // wall-mounted array faces into the room
  Vec3 room = Vec3(6, 6, 3);

  int num_leds() const { return static_cast<int>(leds.size()); }
  int num_elements() const { return static_cast<int>(irs_elements.size()); }
  int num_lus() const { return static_cast<int>(lus.size()); }

  void validate() const;  // throws std::invalid_argument listing violations
};

struct ChannelSet {
  Matrix h_los_lu;              // K x L
  Vector h_los_eve;             // L
  std::vector<Matrix> g_nlos;   // per LED: N x K
  Vector h_nlos_eve;            // L, identically zero

  int num_lus() const { return static_cast<int>(h_los_lu.rows()); }
  int num_leds() const { return static_cast<int>(h_los_lu.cols()); }
  int num_elements() const { return g_nlos.empty() ? 0 : static_cast<int>(g_nlos.front().rows()); }
};

ChannelSet build_channel_set(const Scene& scene, const OpticalParams& params);

// h(k, l) = h_los(k, l) + sum_n q(n, p(l, k)) * g(l, n, k)
Matrix effective_channel(const ChannelSet& channels, const AlignmentState& alignment);

}  // namespace vlcsee
