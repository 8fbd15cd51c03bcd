#include "sadf/synth.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "sadf/error.hpp"

namespace sadf {

namespace {

// Column slots filled by the generator, resolved once against the schema.
enum Slot : std::size_t {
  srcip, sport, dstip, dsport, proto, state, dur, sbytes, dbytes, sttl, dttl, sloss, dloss, service,
  sload, dload, spkts, dpkts, swin, dwin, smeansz, dmeansz, sjit, djit, stime, ltime, sintpkt, dintpkt,
  tcprtt, ct_srv_src, ct_srv_dst, ct_dst_ltm, ct_src_ltm, ct_state_ttl, attack_cat, label, kSlots
};

constexpr std::array<const char*, kSlots> kSlotNames = {
    "srcip", "sport", "dstip", "dsport", "proto", "state", "dur", "sbytes", "dbytes", "sttl", "dttl", "sloss",
    "dloss", "service", "sload", "dload", "spkts", "dpkts", "swin", "dwin", "smeansz", "dmeansz", "sjit", "djit",
    "stime", "ltime", "sintpkt", "dintpkt", "tcprtt", "ct_srv_src", "ct_srv_dst", "ct_dst_ltm", "ct_src_ltm",
    "ct_state_ttl", "attack_cat", "label"};

constexpr std::array<const char*, 5> kCategories = {"DoS", "Exploits", "Fuzzers", "Generic", "Reconnaissance"};

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& items) {
  return items[uniform_index(rng, N)];
}

double lognormal(Rng& rng, double mu, double sigma) { return std::round(std::exp(normal_draw(rng, mu, sigma))); }

double count_draw(Rng& rng, double mean) { return std::max(0.0, std::round(normal_draw(rng, mean, mean / 3 + 1))); }

std::string address(const char* prefix, std::uint64_t host) { return std::string(prefix) + std::to_string(host); }

}  // namespace

SynthGenerator::SynthGenerator(SynthOptions options)
    : options_(options), schema_(load_schema(DatasetId::unsw_nb15)), rng_(options.seed) {
  if (options.attack_fraction < 0 || options.attack_fraction > 1 || options.overlap < 0 || options.overlap > 1)
    throw Error(Errc::usage, "synthetic fractions must lie in [0, 1]");
  if (!(options.flows_per_second > 0)) throw Error(Errc::usage, "flows_per_second must be positive");
  for (const char* name : kSlotNames) {
    const auto col = schema_.find(name);
    if (!col) throw Error(Errc::unknown_feature, std::string("schema lacks ") + name);
    cols_.push_back(*col);
  }
}

FlowRecord SynthGenerator::next() {
  FlowRecord r;
  r.values.assign(schema_.size(), Cell{0.0});
  auto set = [&](Slot s, Cell c) { r.values[cols_[s]] = std::move(c); };

  const bool attack = uniform_unit(rng_) < options_.attack_fraction;
  const bool swapped = uniform_unit(rng_) < options_.overlap;
  const bool looks_attack = attack != swapped;

  const double start = std::floor(options_.start_time + static_cast<double>(row_) / options_.flows_per_second);
  ++row_;

  if (looks_attack) {
    static constexpr std::array<const char*, 4> protos = {"tcp", "udp", "unas", "ospf"};
    static constexpr std::array<const char*, 4> states = {"INT", "FIN", "CON", "REQ"};
    static constexpr std::array<const char*, 4> services = {"-", "dns", "http", "ftp"};
    set(srcip, address("175.45.176.", uniform_index(rng_, 4)));
    set(dstip, address("149.171.126.", 10 + uniform_index(rng_, 10)));
    set(sport, static_cast<double>(uniform_index(rng_, 65536)));
    set(dsport, static_cast<double>(uniform_index(rng_, 1024)));
    set(proto, pick(rng_, protos));
    set(state, pick(rng_, states));
    set(service, pick(rng_, services));
    set(dur, std::abs(normal_draw(rng_, 0.2, 0.4)));
    set(sbytes, lognormal(rng_, 6.0, 1.2));
    set(dbytes, lognormal(rng_, 3.0, 2.0));
    set(sttl, uniform_unit(rng_) < 0.85 ? 254.0 : 62.0);
    set(dttl, uniform_unit(rng_) < 0.7 ? 252.0 : 0.0);
    set(spkts, count_draw(rng_, 4));
    set(dpkts, count_draw(rng_, 2));
    set(smeansz, count_draw(rng_, 120));
    set(dmeansz, count_draw(rng_, 20));
    set(ct_srv_src, count_draw(rng_, 18));
    set(ct_srv_dst, count_draw(rng_, 18));
    set(ct_dst_ltm, count_draw(rng_, 12));
    set(ct_src_ltm, count_draw(rng_, 12));
    set(ct_state_ttl, uniform_unit(rng_) < 0.8 ? 2.0 : 1.0);
  } else {
    static constexpr std::array<const char*, 3> protos = {"tcp", "tcp", "udp"};
    static constexpr std::array<const char*, 3> states = {"FIN", "CON", "FIN"};
    static constexpr std::array<const char*, 5> services = {"-", "http", "dns", "ftp-data", "smtp"};
    static constexpr std::array<double, 6> ports = {80, 53, 21, 25, 111, 443};
    set(srcip, address("59.166.0.", uniform_index(rng_, 10)));
    set(dstip, address("149.171.126.", uniform_index(rng_, 10)));
    set(sport, static_cast<double>(1024 + uniform_index(rng_, 64512)));
    set(dsport, ports[uniform_index(rng_, ports.size())]);
    set(proto, pick(rng_, protos));
    set(state, pick(rng_, states));
    set(service, pick(rng_, services));
    set(dur, std::abs(normal_draw(rng_, 0.8, 1.0)));
    set(sbytes, lognormal(rng_, 7.5, 1.3));
    set(dbytes, lognormal(rng_, 8.5, 1.8));
    set(sttl, uniform_unit(rng_) < 0.9 ? 31.0 : 62.0);
    set(dttl, uniform_unit(rng_) < 0.9 ? 29.0 : 252.0);
    set(spkts, count_draw(rng_, 20));
    set(dpkts, count_draw(rng_, 22));
    set(smeansz, count_draw(rng_, 90));
    set(dmeansz, count_draw(rng_, 400));
    set(ct_srv_src, count_draw(rng_, 6));
    set(ct_srv_dst, count_draw(rng_, 6));
    set(ct_dst_ltm, count_draw(rng_, 3));
    set(ct_src_ltm, count_draw(rng_, 3));
    set(ct_state_ttl, uniform_unit(rng_) < 0.85 ? 0.0 : 1.0);
  }

  const double d = std::get<double>(r.values[cols_[dur]]);
  const double sb = std::get<double>(r.values[cols_[sbytes]]);
  const double db = std::get<double>(r.values[cols_[dbytes]]);
  const double sp = std::get<double>(r.values[cols_[spkts]]);
  const double dp = std::get<double>(r.values[cols_[dpkts]]);
  set(sload, d > 0 ? sb * 8 / d : 0.0);
  set(dload, d > 0 ? db * 8 / d : 0.0);
  set(sintpkt, sp > 1 ? d * 1000 / (sp - 1) : 0.0);
  set(dintpkt, dp > 1 ? d * 1000 / (dp - 1) : 0.0);
  set(sjit, std::abs(normal_draw(rng_, 10, 20)));
  set(djit, std::abs(normal_draw(rng_, 5, 10)));
  set(tcprtt, std::abs(normal_draw(rng_, 0.05, 0.05)));
  set(sloss, count_draw(rng_, looks_attack ? 0.5 : 2));
  set(dloss, count_draw(rng_, looks_attack ? 0.2 : 2));
  const double win = uniform_unit(rng_) < 0.5 ? 255.0 : 0.0;
  set(swin, win);
  set(dwin, win);
  set(stime, start);
  set(ltime, start + std::floor(d));
  r.stime = start;

  if (attack) {
    set(attack_cat, std::string(pick(rng_, kCategories)));
    set(label, 1.0);
  } else {
    set(attack_cat, std::monostate{});
    set(label, 0.0);
  }
  // Port columns are categorical in the schema; keep cell types as a parser would.
  for (std::size_t c = 0; c < schema_.size(); ++c)
    if (schema_[c].kind == FeatureKind::categorical && std::holds_alternative<double>(r.values[c]))
      r.values[c] = format_cell(r.values[c]);
  return r;
}

std::vector<FlowRecord> synth_records(std::size_t count, const SynthOptions& options) {
  SynthGenerator gen(options);
  std::vector<FlowRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
  return out;
}

void write_synth_csv(const std::filesystem::path& path, std::size_t count, const SynthOptions& options,
                     bool header) {
  SynthGenerator gen(options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  if (header) {
    const auto& features = gen.schema().features();
    for (std::size_t i = 0; i < features.size(); ++i) out << (i ? "," : "") << features[i].name;
    out << '\n';
  }
  for (std::size_t i = 0; i < count; ++i) out << format_record(gen.next()) << '\n';
  if (!out.flush()) throw Error(Errc::io_failure, "write to " + path.string() + " failed");
}

}  // namespace sadf
