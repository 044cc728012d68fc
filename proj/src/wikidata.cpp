#include "argkg/wikidata.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "argkg/error.hpp"
#include "argkg/text.hpp"
#include "json.hpp"

namespace argkg {

using nlohmann::json;

namespace {

constexpr std::string_view kEntityPrefix = "http://www.wikidata.org/entity/";
constexpr std::string_view kDirectPropPrefix = "http://www.wikidata.org/prop/direct/";

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string strip_prefix(const std::string& v, std::string_view prefix) {
  if (v.compare(0, prefix.size(), prefix) != 0) return {};
  return v.substr(prefix.size());
}

std::string utc_now_iso() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_item_id(const std::string& id) {
  return id.size() > 1 && id[0] == 'Q' && is_numeric(std::string_view(id).substr(1));
}

}  // namespace

const char* to_string(ClientMode m) {
  switch (m) {
    case ClientMode::Live: return "live";
    case ClientMode::Record: return "record";
    case ClientMode::Replay: return "replay";
  }
  return "replay";
}

ClientMode client_mode_from_string(std::string_view s) {
  if (s == "live") return ClientMode::Live;
  if (s == "record") return ClientMode::Record;
  if (s == "replay") return ClientMode::Replay;
  throw ConfigError("unknown client mode '" + std::string(s) + "'");
}

bool EntityNeighborhood::operator==(const EntityNeighborhood& o) const {
  if (!(entity == o.entity) || statements.size() != o.statements.size()) return false;
  for (size_t i = 0; i < statements.size(); ++i) {
    if (!(statements[i].statement == o.statements[i].statement) ||
        statements[i].object_label != o.statements[i].object_label) {
      return false;
    }
  }
  return true;
}

std::string build_entity_query(const std::string& entity_id,
                               const std::vector<std::string>& properties,
                               int result_limit) {
  if (properties.empty()) throw ConfigError("entity query needs at least one property");
  if (entity_id.empty()) throw ConfigError("entity query needs an entity id");
  std::ostringstream q;
  q << "PREFIX wd: <http://www.wikidata.org/entity/>\n"
       "PREFIX wdt: <http://www.wikidata.org/prop/direct/>\n"
       "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
       "SELECT ?p ?o ?oLabel ?sLabel WHERE {\n"
       "  VALUES ?p {";
  for (const auto& p : sorted_unique(properties)) q << " wdt:" << p;
  q << " }\n"
    << "  wd:" << entity_id << " ?p ?o .\n"
    << "  FILTER(STRSTARTS(STR(?o), \"http://www.wikidata.org/entity/Q\"))\n"
    << "  OPTIONAL { ?o rdfs:label ?oLabel . FILTER(LANG(?oLabel) = \"en\") }\n"
    << "  OPTIONAL { wd:" << entity_id
    << " rdfs:label ?sLabel . FILTER(LANG(?sLabel) = \"en\") }\n"
    << "}\n"
    << "LIMIT " << result_limit << "\n";
  return q.str();
}

std::string cache_key(const std::string& entity_id,
                      const std::vector<std::string>& properties) {
  std::string material = entity_id + "\n";
  bool first = true;
  for (const auto& p : sorted_unique(properties)) {
    if (!first) material += ",";
    material += p;
    first = false;
  }
  return sha256_hex(material);
}

EntityNeighborhood parse_entity_response(const std::string& body,
                                         const std::string& entity_id,
                                         const std::vector<std::string>& properties) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ParseError("malformed SPARQL response for " + entity_id + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("results") ||
      !doc["results"].contains("bindings") || !doc["results"]["bindings"].is_array()) {
    throw ParseError("SPARQL response for " + entity_id + " lacks results.bindings");
  }
  std::set<std::string> wanted(properties.begin(), properties.end());
  EntityNeighborhood out;
  std::string subject_label;
  std::set<std::pair<std::string, std::string>> seen;
  try {
    for (const auto& row : doc["results"]["bindings"]) {
      if (subject_label.empty() && row.contains("sLabel")) {
        subject_label = row["sLabel"].at("value").get<std::string>();
      }
      if (!row.contains("p") || !row.contains("o")) continue;
      std::string p = strip_prefix(row["p"].at("value").get<std::string>(), kDirectPropPrefix);
      std::string o = strip_prefix(row["o"].at("value").get<std::string>(), kEntityPrefix);
      if (p.empty() || !wanted.count(p) || !is_item_id(o)) continue;
      if (!seen.emplace(p, o).second) continue;
      NeighborStatement ns;
      ns.statement = {entity_id, p, o, false};
      if (row.contains("oLabel")) ns.object_label = row["oLabel"].at("value").get<std::string>();
      out.statements.push_back(std::move(ns));
    }
  } catch (const json::exception& e) {
    throw ParseError("malformed SPARQL binding for " + entity_id + ": " + e.what());
  }
  out.entity = EntityRef::make(entity_id, subject_label.empty() ? entity_id : subject_label);
  return out;
}

LocalKbTransport::LocalKbTransport(const std::filesystem::path& triples,
                                   const std::filesystem::path& labels) {
  std::ifstream tin(triples);
  if (!tin) throw IoError("cannot open knowledge-base triples " + triples.string());
  std::string line;
  long lineno = 0;
  while (std::getline(tin, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string s, p, o;
    if (!std::getline(ss, s, '\t') || !std::getline(ss, p, '\t') || !std::getline(ss, o, '\t')) {
      throw ParseError("triple line needs three tab-separated fields", lineno);
    }
    out_[trim(s)].emplace_back(trim(p), trim(o));
  }
  std::ifstream lin(labels);
  if (!lin) throw IoError("cannot open knowledge-base labels " + labels.string());
  lineno = 0;
  while (std::getline(lin, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("label line needs id<TAB>label", lineno);
    labels_[trim(line.substr(0, tab))] = trim(line.substr(tab + 1));
  }
}

LocalKbTransport::LocalKbTransport(std::vector<Statement> triples,
                                   std::map<std::string, std::string> labels)
    : labels_(std::move(labels)) {
  for (auto& t : triples) out_[t.subject].emplace_back(t.predicate, t.object);
}

HttpResponse LocalKbTransport::send(const HttpRequest& request) {
  static const std::regex subject_re(R"(wd:(Q[0-9]+) \?p \?o)");
  static const std::regex values_re(R"(VALUES \?p \{([^}]*)\})");
  static const std::regex limit_re(R"(LIMIT ([0-9]+))");
  std::smatch m;
  if (!std::regex_search(request.query, m, subject_re)) return {400, "unsupported query"};
  std::string subject = m[1];
  if (!std::regex_search(request.query, m, values_re)) return {400, "unsupported query"};
  std::set<std::string> props;
  for (auto& tok : split_alnum(m[1].str())) {
    if (tok != "wdt") props.insert(tok);
  }
  size_t limit = SIZE_MAX;
  if (std::regex_search(request.query, m, limit_re)) limit = std::stoul(m[1]);

  json bindings = json::array();
  auto it = out_.find(subject);
  if (it != out_.end()) {
    for (const auto& [p, o] : it->second) {
      if (!props.count(p) || bindings.size() >= limit) continue;
      json row;
      row["p"] = {{"type", "uri"}, {"value", std::string(kDirectPropPrefix) + p}};
      row["o"] = {{"type", "uri"}, {"value", std::string(kEntityPrefix) + o}};
      if (auto l = labels_.find(o); l != labels_.end()) {
        row["oLabel"] = {{"type", "literal"}, {"xml:lang", "en"}, {"value", l->second}};
      }
      if (auto l = labels_.find(subject); l != labels_.end()) {
        row["sLabel"] = {{"type", "literal"}, {"xml:lang", "en"}, {"value", l->second}};
      }
      bindings.push_back(std::move(row));
    }
  }
  json doc;
  doc["head"] = {{"vars", {"p", "o", "oLabel", "sLabel"}}};
  doc["results"] = {{"bindings", bindings}};
  return {200, doc.dump()};
}

WikidataClient::WikidataClient(SparqlEndpointConfig config,
                               std::unique_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::filesystem::path WikidataClient::cache_path(
    const std::string& entity_id, const std::vector<std::string>& properties) const {
  return config_.cache_dir / (cache_key(entity_id, properties) + ".json");
}

std::string WikidataClient::fetch(const std::string& query) {
  if (!transport_) transport_ = make_http_transport();
  HttpRequest req{config_.endpoint, query, config_.user_agent, config_.timeout_seconds};
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (has_last_request_) {
      auto wait = std::chrono::milliseconds(config_.min_delay_ms * (attempt + 1)) -
                  (std::chrono::steady_clock::now() - last_request_);
      if (wait > std::chrono::steady_clock::duration::zero()) std::this_thread::sleep_for(wait);
    }
    last_request_ = std::chrono::steady_clock::now();
    has_last_request_ = true;
    ++network_requests_;
    try {
      HttpResponse resp = transport_->send(req);
      if (resp.status == 200) return resp.body;
      last_error = "HTTP " + std::to_string(resp.status);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw TransportError("SPARQL request failed after " +
                       std::to_string(config_.max_retries + 1) +
                       " attempts: " + last_error);
}

EntityNeighborhood WikidataClient::query_entity(const std::string& entity_id,
                                                const std::vector<std::string>& properties) {
  ++queries_issued_;
  std::string query = build_entity_query(entity_id, properties, config_.result_limit);
  auto path = cache_path(entity_id, properties);

  if (config_.mode == ClientMode::Replay) {
    std::ifstream in(path);
    if (!in) {
      throw CacheMissError("no cached response for " + entity_id + " (" +
                           path.filename().string() + ")");
    }
    json entry;
    try {
      entry = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError("corrupt cache entry " + path.string() + ": " + e.what());
    }
    if (!entry.contains("response") || !entry["response"].is_string()) {
      throw ParseError("cache entry " + path.string() + " has no response");
    }
    return parse_entity_response(entry["response"].get<std::string>(), entity_id, properties);
  }

  std::string body;
  {
    std::lock_guard lock(mutex_);
    body = fetch(query);
    if (config_.mode == ClientMode::Record) {
      std::error_code ec;
      std::filesystem::create_directories(config_.cache_dir, ec);
      json entry;
      entry["request"] = {{"endpoint", config_.endpoint},
                          {"entity_id", entity_id},
                          {"properties", sorted_unique(properties)},
                          {"query", query}};
      entry["response"] = body;
      entry["fetched_at"] = utc_now_iso();
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write cache entry " + path.string());
      out << entry.dump(1) << "\n";
    }
  }
  return parse_entity_response(body, entity_id, properties);
}

}  // namespace argkg
