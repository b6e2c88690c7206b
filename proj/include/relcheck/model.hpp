#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "relcheck/minkowski.hpp"
#include "relcheck/sort.hpp"

namespace relcheck {

enum class ModelKind { StlOnly, Ftl };

const char* to_string(ModelKind k);

struct Observer {
  Line line;
};

// Future-directed null segment; beg == end for events.
struct Signal {
  Vec4 beg;
  Vec4 end;
};

inline Signal event_at(const Vec4& p) { return Signal{p, p}; }

using Entity = std::variant<Observer, Signal>;

Sort sort_of(const Entity& e);
bool entity_equal(const Entity& a, const Entity& b);
std::string render_entity(const Entity& e);

// Raised when a predicate is only meaningful for slower-than-light arguments.
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool observer_allowed(ModelKind k, const Line& l);
Observer make_observer(ModelKind k, const Vec4& base, const Vec4& dir);
Signal make_signal(const Vec4& beg, const Vec4& end);

enum class Incidence { Transmits, Receives, Both, Neither };
enum class ObserverClass { STL, Lightspeed, FTL };
const char* to_string(Incidence i);
const char* to_string(ObserverClass c);

Incidence incidence(const Observer& a, const Signal& s);
bool transmits(const Observer& a, const Signal& s);
bool receives(const Observer& a, const Signal& s);
bool is_event(const Signal& s);
bool is_beg(const Signal& ev, const Signal& s);
bool is_end(const Signal& ev, const Signal& s);

bool meets(const Observer& a, const Observer& b);
bool coplanar(const Observer& a, const Observer& b);
bool parallel(const Observer& a, const Observer& b);
bool lightlike(const Signal& e1, const Signal& e2);
bool light_between(const Signal& e1, const Signal& e2);
bool chron_precedes(const Signal& e1, const Signal& e2);
ObserverClass observer_class(const Observer& a);

bool bw_geo(const Observer& a, const Observer& b, const Observer& c);
bool eq_geo(const Observer& a, const Observer& b, const Observer& c, const Observer& d);
bool sim_geo(const Observer& c, const Signal& e1, const Signal& e2);
bool delta_geo(const Observer& a, const Signal& a0, const Signal& a1, const Signal& b0,
               const Signal& b1);
std::optional<Observer> tau_geo(const Observer& b, const Signal& e1, const Signal& e2);
bool tau_holds(const Observer& c, const Observer& b, const Signal& e1, const Signal& e2);

bool rho(const Observer& a, const Observer& b);
bool optical_plane(const Observer& a, const Observer& b);
bool bw_rho(const Observer& a, const Observer& b, const Observer& c);
bool eq_rho(const Observer& a, const Observer& b, const Observer& c, const Observer& d);
std::optional<Observer> relatable_dual(const Observer& a, const Observer& b);
// a2 is a relatable dual of a with respect to b.
bool is_relatable_dual(const Observer& a2, const Observer& a, const Observer& b);
bool bw_ftl(const Observer& a, const Observer& b, const Observer& c);
bool eq_ftl(const Observer& a, const Observer& b, const Observer& c, const Observer& d);
bool sim_ftl(const Observer& c, const Signal& e1, const Signal& e2);
bool delta_ftl(const Observer& a, const Signal& a0, const Signal& a1, const Signal& b0,
               const Signal& b1);
std::optional<Observer> tau_ftl(const Observer& b, const Signal& e1, const Signal& e2);
bool tau_ftl_holds(const Observer& c, const Observer& b, const Signal& e1, const Signal& e2);

// |x - c| <= |r - c| and |x - c| >= |r - c| inside a parallel family.
bool in_ball(const Observer& x, const Observer& c, const Observer& r);
bool out_ball(const Observer& x, const Observer& c, const Observer& r);
// Ball membership through the faster-than-light betweenness and equidistance.
bool in_ball_ftl(const Observer& x, const Observer& c, const Observer& r);
bool out_ball_ftl(const Observer& x, const Observer& c, const Observer& r);

// Starting points p on the line with p -> target future null (at most two).
std::vector<Vec4> null_sources_on(const Line& l, const Vec4& target);
// End points q on the line with source -> q future null (at most two).
std::vector<Vec4> null_targets_on(const Line& l, const Vec4& source);
// The event of a that is simultaneous with p in a's frame.
Vec4 sim_projection(const Line& a, const Vec4& p);

// A scenario: a model kind plus named entities.
struct Scenario {
  ModelKind kind = ModelKind::StlOnly;
  std::map<std::string, Observer> observers;
  std::map<std::string, Signal> signals;
};

Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
std::string save_scenario(const Scenario& s);

}  // namespace relcheck
