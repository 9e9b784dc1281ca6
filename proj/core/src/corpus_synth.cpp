#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "intent_router/corpus.hpp"
#include "intent_router/error.hpp"
#include "intent_router/rng.hpp"
#include "intent_router/variants.hpp"

namespace intent_router {

namespace {

using Pool = std::vector<std::string>;

template <typename T>
const T& pick(DeterministicRng& rng, const std::vector<T>& pool) {
  return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

std::string hex(DeterministicRng& rng, int digits) {
  static constexpr std::string_view kDigits = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < digits; ++i) out += kDigits[rng.below(16)];
  return out;
}

std::string uuid(DeterministicRng& rng) {
  return hex(rng, 8) + "-" + hex(rng, 4) + "-4" + hex(rng, 3) + "-a" + hex(rng, 3) + "-" + hex(rng, 12);
}

// Locations: city, region, coordinates, data center.
std::string location(DeterministicRng& rng) {
  static const Pool cities = {"Ottawa", "Toronto", "Montreal", "Vancouver", "Calgary", "Halifax",
                              "Berlin", "Madrid", "Seoul", "Osaka", "Austin", "Denver"};
  static const Pool regions = {"the north-east region", "the western region", "Northern Ontario",
                               "the Atlantic region", "region eu-central", "zone us-west-2",
                               "the downtown core", "the southern corridor"};
  static const Pool centers = {"data center DC-7", "the Kanata data center", "edge site E12",
                               "data center YOW-3", "the Markham edge facility", "data center FRA-2"};
  switch (rng.below(4)) {
    case 0: return pick(rng, cities);
    case 1: return pick(rng, regions);
    case 2: {
      const double lat = 30.0 + static_cast<double>(rng.below(2500)) / 100.0;
      const double lon = 70.0 + static_cast<double>(rng.below(5000)) / 100.0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "coordinates %.2fN %.2fW", lat, lon);
      return buf;
    }
    default: return pick(rng, centers);
  }
}

// Network identifiers: name, short-hand, instance number, alphanumeric, hex, UUID.
std::string network(DeterministicRng& rng) {
  static const Pool names = {"the campus network", "the city-wide slice", "the stadium network",
                             "the hospital network", "the factory floor network", "the metro backhaul"};
  static const Pool shorthand = {"the eMBB slice", "the URLLC slice", "the mMTC slice", "the AMF pool",
                                 "the UPF cluster", "the SMF set"};
  switch (rng.below(6)) {
    case 0: return pick(rng, names);
    case 1: return pick(rng, shorthand);
    case 2: return "network instance #" + std::to_string(1 + rng.below(64));
    case 3: {
      static const Pool prefixes = {"NET", "SLC", "CORE", "NS"};
      return "network " + pick(rng, prefixes) + "-" + std::to_string(100 + rng.below(900)) +
             static_cast<char>('A' + rng.below(26));
    }
    case 4: return "network 0x" + hex(rng, 6);
    default: return "network " + uuid(rng);
  }
}

const std::map<std::string, std::function<std::string(DeterministicRng&)>>& slots() {
  static const std::map<std::string, std::function<std::string(DeterministicRng&)>> table = {
      {"loc", location},
      {"net", network},
      {"qos", [](DeterministicRng& r) {
         static const Pool p = {"low-latency", "high-reliability", "high-bandwidth", "gold QoS",
                                "best-effort", "real-time video", "mission-critical", "5QI 82"};
         return pick(r, p);
       }},
      {"app", [](DeterministicRng& r) {
         static const Pool p = {"remote surgery", "cloud gaming", "autonomous vehicle", "AR streaming",
                                "video conferencing", "industrial control", "smart metering", "drone telemetry"};
         return pick(r, p);
       }},
      {"ms", [](DeterministicRng& r) { return std::to_string(5 * (1 + r.below(20))); }},
      {"mbps", [](DeterministicRng& r) { return std::to_string(50 * (1 + r.below(40))); }},
      {"users", [](DeterministicRng& r) { return std::to_string(500 * (1 + r.below(40))); }},
      {"n", [](DeterministicRng& r) { return std::to_string(2 + r.below(9)); }},
      {"pct", [](DeterministicRng& r) { return std::to_string(10 + 5 * r.below(10)); }},
      {"freq", [](DeterministicRng& r) {
         static const Pool p = {"15 minutes", "30 minutes", "hour", "6 hours", "day", "week", "5 minutes",
                                "12 hours"};
         return pick(r, p);
       }},
      {"nf", [](DeterministicRng& r) {
         static const Pool p = {"UPF", "AMF", "SMF", "NRF", "PCF", "AUSF"};
         return pick(r, p);
       }},
      {"metric", [](DeterministicRng& r) {
         static const Pool p = {"throughput", "packet loss", "latency", "CPU load", "session count",
                                "availability"};
         return pick(r, p);
       }},
  };
  return table;
}

std::string fill(std::string_view tmpl, DeterministicRng& rng) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      const std::string key(tmpl.substr(i + 1, close - i - 1));
      out += slots().at(key)(rng);
      i = close + 1;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

struct RouteTemplates {
  std::string_view label;
  std::string_view slug;
  std::vector<std::string_view> templates;
};

const std::vector<RouteTemplates>& templates() {
  static const std::vector<RouteTemplates> table = {
      {"Deployment Intent", "deploy",
       {"Deploy a new network in {loc} with {n} UPF instances and {mbps} Mbps of uplink capacity.",
        "Please deploy a new 5G core slice for {app} in {loc}.",
        "I want to deploy {net} in {loc} to serve {users} subscribers.",
        "Set up a new network in {loc} with an AMF, an SMF and {n} UPFs.",
        "Can you deploy a fresh {qos} slice in {loc} for {app}?",
        "Roll out a new network in {loc} with {mbps} Mbps downlink and a {ms} ms latency budget.",
        "Deploy {n} new {nf} instances for {net} in {loc}.",
        "Provision a new private network at {loc} for {app} with {users} devices."}},
      {"Modification Intent", "modify",
       {"Modify {net} to address the congestion caused by high load in {loc}.",
        "Adjust the configuration parameters of {net} to enhance throughput.",
        "Scale {net} out to {n} {nf} instances to relieve the load.",
        "Change the bandwidth allocation of {net} to {mbps} Mbps.",
        "Please update {net} so that it uses {pct}% less CPU on its {nf}.",
        "Reconfigure {net} in {loc} to reduce the packet loss on the backhaul.",
        "Increase the {nf} capacity of {net} by {pct}% due to performance issues.",
        "Move the {nf} of {net} to {loc} to reduce latency."}},
      {"Performance Assurance Intent", "assure",
       {"Ensure that {net} can support a {qos} application with at most {ms} ms latency.",
        "Guarantee {mbps} Mbps of throughput for {app} on {net}.",
        "Make sure {net} maintains 99.{n}% availability for {app}.",
        "Ensure the deployed network in {loc} meets the requirements of {app}: {ms} ms latency and {mbps} Mbps.",
        "Maintain end-to-end latency below {ms} ms for {users} {app} users on {net}.",
        "Keep packet loss under 0.{n}% on {net} for the {qos} service.",
        "Assure that {net} sustains {qos} performance for {app} during peak hours.",
        "Ensure {net} can handle {users} concurrent {app} sessions without degradation."}},
      {"Intent Report Request", "report",
       {"Summarize the results of the request for {net}.",
        "Give me a report on the outcome of my last intent in {loc}.",
        "What happened with the previous deployment request for {net}?",
        "Provide a summary of the changes applied to {net}.",
        "Report back on the results of the last modification to {net}.",
        "Can you summarize how the previous request in {loc} went?",
        "Show me a report of the {metric} results after my previous intent on {net}.",
        "I would like a summary of the outcome of the request I made for {app}."}},
      {"Intent Feasibility Check", "feasibility",
       {"Before proceeding, check that there is enough capacity in {loc} to deploy {n} more {nf} instances.",
        "Is it feasible to add {mbps} Mbps to {net} in {loc}?",
        "Check whether {loc} has the capacity to host a {qos} slice for {app}.",
        "Before making changes, verify that {net} has sufficient resources for {users} more users.",
        "Determine if there is enough capacity left in {loc} for {app}.",
        "Can {loc} accommodate another {nf} before we modify {net}?",
        "Verify the feasibility of scaling {net} by {pct}% in {loc}.",
        "Check if capacity exists in {loc} to support {users} {app} devices."}},
      {"Regular Notification Request", "notify",
       {"Notify me of the status of {net} every {freq}.",
        "Send me the {metric} of {net} every {freq}.",
        "Alert me every {freq} with the health of {net} in {loc}.",
        "Keep me informed about {net} with a status update every {freq}.",
        "Please send a notification with the {metric} of {net} every {freq}.",
        "Let me know the status of the {nf} in {loc} every {freq}.",
        "I want a periodic update on {net} every {freq}.",
        "Notify me every {freq} about {metric} changes on {net}."}},
  };
  return table;
}

}  // namespace

std::vector<LabeledPrompt> synthesize_seed_prompts(std::uint64_t seed, std::size_t per_route) {
  if (per_route == 0) throw Error(ErrorCode::kInvalidArgument, "per_route must be positive");
  std::vector<LabeledPrompt> out;
  out.reserve(per_route * templates().size());
  for (const auto& route : templates()) {
    DeterministicRng rng(derive_seed(seed, route.label));
    std::set<std::string> seen;
    std::size_t attempts = 0;
    for (std::size_t i = 0; i < per_route; ++i) {
      std::string text;
      do {
        if (++attempts > per_route * 1000) {
          throw Error(ErrorCode::kInsufficientPrompts, "cannot produce distinct prompts for " + std::string(route.label));
        }
        text = fill(route.templates[i % route.templates.size()], rng);
      } while (!seen.insert(text).second);
      char id[32];
      std::snprintf(id, sizeof id, "%s-%02zu", std::string(route.slug).c_str(), i + 1);
      LabeledPrompt p;
      p.text = std::move(text);
      p.label = std::string(route.label);
      p.variant = Variant::kSeed;
      p.source_id = id;
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace intent_router
