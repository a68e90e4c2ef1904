// SPDX-License-Identifier: Apache-2.0
#include "trackpred/types.hpp"

#include <numbers>

#include "trackpred/errors.hpp"

namespace trackpred {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

std::string_view to_string(AgentClass c) {
  switch (c) {
    case AgentClass::Car: return "car";
    case AgentClass::Bus: return "bus";
    case AgentClass::Truck: return "truck";
    case AgentClass::Rickshaw: return "rickshaw";
    case AgentClass::Pedestrian: return "pedestrian";
    case AgentClass::Scooter: return "scooter";
    case AgentClass::Motorcycle: return "motorcycle";
    case AgentClass::Bicycle: return "bicycle";
    case AgentClass::Other: return "other";
  }
  return "other";
}

AgentClass parse_agent_class(std::string_view name) {
  for (int i = 0; i < kNumAgentClasses; ++i) {
    const auto c = static_cast<AgentClass>(i);
    if (to_string(c) == name) return c;
  }
  throw Error("unknown agent class '" + std::string(name) + "'");
}

ClassDefaults ClassDefaults::standard() {
  ClassDefaults d;
  auto set = [&d](AgentClass c, AgentSize size, double pref) {
    const int i = static_cast<int>(c);
    d.size[i] = size;
    d.pref_speed[i] = pref;
    d.max_speed[i] = 1.5 * pref;
  };
  set(AgentClass::Car, {4.5, 1.8}, 12.0);
  set(AgentClass::Bus, {12.0, 2.6}, 9.0);
  set(AgentClass::Truck, {8.0, 2.5}, 10.0);
  set(AgentClass::Rickshaw, {2.8, 1.4}, 6.0);
  set(AgentClass::Pedestrian, {0.5, 0.5}, 1.4);
  set(AgentClass::Scooter, {2.0, 0.8}, 10.0);
  set(AgentClass::Motorcycle, {2.0, 0.8}, 10.0);
  set(AgentClass::Bicycle, {1.8, 0.6}, 4.0);
  set(AgentClass::Other, {2.0, 2.0}, 5.0);
  return d;
}

}  // namespace trackpred
