#pragma once

// Spec-string parsers for states, filters, families and POVMs, and the JSON /
// CSV forms of every report.
//
//   vacuum | coherent:re=,im= | fock:n= | thermal:nbar= | squeezed:r=,phase=
//   cat:re=,im=,parity= | numeric:file=<json>
//   gaussian:r= | noncl:L=,q= | klauder:L= | kernel:state=<state> | narcowich-ce
//   family: noncl:q= | gaussian        povm: fock:nmax=
//   channel: loss:eta=

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "phasefilter/applications.hpp"
#include "phasefilter/physicality.hpp"

namespace phasefilter {

inline constexpr const char* version = "0.1.0";

struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

StateSpec parse_state(const std::string& spec);
Filter parse_filter(const std::string& spec);
FilterFamily parse_family(const std::string& spec);
PovmSpec parse_povm(const std::string& spec);
ChannelSpec parse_channel(const std::string& spec);

using json = nlohmann::ordered_json;

json fock_to_json(const FockMatrix& m);
FockMatrix fock_from_json(const json& j);

json to_json(const PhysicalityReport& r);
json to_json(const FilteredState& s);
json to_json(const FidelityCertificate& c);
json to_json(const BoundReport& r);
json to_json(const WidthSolution& w);
json to_json(const EstimationResult& e);
json to_json(const ChannelOutput& c);
json grid_to_json(const PQDGrid& g);

// '#'-prefixed header lines, then re,im,value rows (imaginary axis outer)
void write_grid_csv(std::ostream& os, const PQDGrid& g,
                    const std::map<std::string, std::string>& header = {});

}  // namespace phasefilter
