#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "argkg/kg.hpp"

namespace argkg {

enum class ClientMode { Live, Record, Replay };

const char* to_string(ClientMode m);
ClientMode client_mode_from_string(std::string_view s);

struct SparqlEndpointConfig {
  std::string endpoint = "https://query.wikidata.org/sparql";
  double timeout_seconds = 30.0;
  int min_delay_ms = 200;
  std::string user_agent = "argkg/1.0 (offline evidence extraction)";
  std::filesystem::path cache_dir = "cache";
  ClientMode mode = ClientMode::Replay;
  int max_retries = 3;
  int result_limit = 500;
};

struct NeighborStatement {
  Statement statement;
  std::string object_label;  // empty when the knowledge base has none
};

struct EntityNeighborhood {
  EntityRef entity;
  std::vector<NeighborStatement> statements;
  bool operator==(const EntityNeighborhood& o) const;
};

// One SELECT covering every requested property of one subject. Property ids
// are sorted and deduplicated, so the text depends only on the property set.
// Throws ConfigError on an empty property list.
std::string build_entity_query(const std::string& entity_id,
                               const std::vector<std::string>& properties,
                               int result_limit = 500);

// sha256 hex over the entity id and the sorted, deduplicated property ids.
std::string cache_key(const std::string& entity_id,
                      const std::vector<std::string>& properties);

// Parses a SPARQL 1.1 JSON result document. Rows whose predicate is not in
// `properties` or whose object is not an item are dropped. Throws ParseError.
EntityNeighborhood parse_entity_response(const std::string& body,
                                         const std::string& entity_id,
                                         const std::vector<std::string>& properties);

struct HttpRequest {
  std::string url;
  std::string query;
  std::string user_agent;
  double timeout_seconds = 30.0;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Raw request channel. Implementations throw TransportError on network
// failure; HTTP error statuses are returned, not thrown.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// HTTP(S) POST of the query as application/x-www-form-urlencoded with
// Accept: application/sparql-results+json.
std::unique_ptr<Transport> make_http_transport();

// Answers entity queries from a local triple dump, so a replay cache can be
// recorded without network access. Only understands queries produced by
// build_entity_query.
class LocalKbTransport : public Transport {
 public:
  // triples: TSV "subject predicate object"; labels: TSV "id label".
  LocalKbTransport(const std::filesystem::path& triples,
                   const std::filesystem::path& labels);
  LocalKbTransport(std::vector<Statement> triples,
                   std::map<std::string, std::string> labels);
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> out_;
  std::map<std::string, std::string> labels_;
};

// Entity-at-a-time SPARQL client with a record/replay cache. Requests are
// serialized; one client may be shared by many worker threads.
class WikidataClient {
 public:
  // A null transport is allowed in Replay mode; Live and Record then fall
  // back to the HTTP transport.
  WikidataClient(SparqlEndpointConfig config, std::unique_ptr<Transport> transport = nullptr);

  EntityNeighborhood query_entity(const std::string& entity_id,
                                  const std::vector<std::string>& properties);

  const SparqlEndpointConfig& config() const { return config_; }
  std::filesystem::path cache_path(const std::string& entity_id,
                                   const std::vector<std::string>& properties) const;

  // Calls to query_entity, whatever the mode.
  size_t queries_issued() const { return queries_issued_; }
  // Requests handed to the transport, retries included.
  size_t network_requests() const { return network_requests_; }

 private:
  std::string fetch(const std::string& query);

  SparqlEndpointConfig config_;
  std::unique_ptr<Transport> transport_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point last_request_{};
  bool has_last_request_ = false;
  std::atomic<size_t> queries_issued_{0};
  std::atomic<size_t> network_requests_{0};
};

}  // namespace argkg
