#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/ingest/article.hpp"
#include "newsdesk/service/run.hpp"
#include "newsdesk/translator/translate.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::service {

using ingest::Article;
using translator::TranslationJob;

enum class LabelOrigin { Operator, Predicted };

constexpr std::string_view to_string(LabelOrigin o) { return o == LabelOrigin::Operator ? "operator" : "predicted"; }

struct LabelRecord {
  std::string article_id;
  std::string class_label;
  LabelOrigin origin = LabelOrigin::Predicted;
  Timestamp at{};
  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

inline nlohmann::json to_json(const LabelRecord& l) {
  return {{"article_id", l.article_id},
          {"class_label", l.class_label},
          {"origin", to_string(l.origin)},
          {"at", format_iso8601(l.at)}};
}

inline LabelRecord label_from_json(const nlohmann::json& j) {
  LabelRecord l;
  l.article_id = j.at("article_id").get<std::string>();
  l.class_label = j.at("class_label").get<std::string>();
  l.origin = j.at("origin").get<std::string>() == "operator" ? LabelOrigin::Operator : LabelOrigin::Predicted;
  l.at = parse_iso8601(j.at("at").get<std::string>()).value_or(Timestamp{});
  return l;
}

struct TopicThreshold {
  std::string topic;
  double min_score = 0.0;
};

struct ArticleQuery {
  std::optional<std::string> class_label;
  std::optional<TopicThreshold> topic_min_score;
  std::optional<std::string> source_id;
  std::optional<std::string> text_query;
  std::size_t limit = 20;
  std::size_t offset = 0;
};

inline constexpr std::size_t kMaxPageSize = 1000;

struct ArticlePage {
  std::vector<Article> items;
  std::size_t total = 0;
};

// Holds an exclusive advisory lock (flock) on a file for its lifetime.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::StoreLocked, "cannot lock " + path.string());
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  int fd_ = -1;
};

// Directory of append-only JSON-lines logs:
//   articles.jsonl  immutable article records
//   labels.jsonl    class assignments (operator or predicted); last one wins
//   jobs.jsonl      finished translation jobs
//   runs.jsonl      pipeline run reports
//   models/         trained classifier
// Writers take an advisory lock on LOCK for each append, so several
// processes can share a store. A trailing line without '\n' is an
// interrupted write: readers ignore it and the next writer truncates it.
class ArticleStore {
 public:
  explicit ArticleStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_ / "models");
    articles_log_.path = dir_ / "articles.jsonl";
    labels_log_.path = dir_ / "labels.jsonl";
    jobs_log_.path = dir_ / "jobs.jsonl";
    runs_log_.path = dir_ / "runs.jsonl";
    refresh();
  }
  ArticleStore(const ArticleStore&) = delete;
  ArticleStore& operator=(const ArticleStore&) = delete;

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path model_path() const { return dir_ / "models" / "model.json"; }

  // Picks up records appended since the last call, by this or another
  // process.
  void refresh() {
    std::unique_lock lock(data_mu_);
    tail(articles_log_, [this](const nlohmann::json& j) { apply_article(ingest::article_from_json(j)); });
    tail(labels_log_, [this](const nlohmann::json& j) { apply_label(label_from_json(j)); });
    tail(jobs_log_, [this](const nlohmann::json& j) {
      auto job = translator::job_from_json(j);
      jobs_index_[job.id] = jobs_.size();
      jobs_.push_back(std::move(job));
    });
    tail(runs_log_, [this](const nlohmann::json& j) { runs_.push_back(run_from_json(j)); });
  }

  // --- reads ---

  std::size_t size() const {
    std::shared_lock lock(data_mu_);
    return articles_.size();
  }

  std::optional<Article> find(const std::string& id) const {
    std::shared_lock lock(data_mu_);
    auto it = articles_.find(id);
    if (it == articles_.end()) return std::nullopt;
    return it->second;
  }

  Article get(const std::string& id) const {
    if (auto a = find(id)) return *a;
    throw Error(ErrorCode::UnknownArticle, "no article with id '" + id + "'");
  }

  bool has_hash(std::uint64_t hash) const {
    std::shared_lock lock(data_mu_);
    return hashes_.contains(hash);
  }

  // Every article, newest fetch first, then by id.
  std::vector<Article> all() const {
    std::shared_lock lock(data_mu_);
    std::vector<Article> out;
    out.reserve(order_.size());
    for (const auto& key : order_) out.push_back(articles_.at(key.second));
    return out;
  }

  std::vector<std::string> ids_with_label(const std::string& label) const {
    std::shared_lock lock(data_mu_);
    auto it = by_class_.find(label);
    return it == by_class_.end() ? std::vector<std::string>{}
                                 : std::vector<std::string>(it->second.begin(), it->second.end());
  }

  std::vector<std::string> ids_for_source(const std::string& source_id) const {
    std::shared_lock lock(data_mu_);
    auto it = by_source_.find(source_id);
    return it == by_source_.end() ? std::vector<std::string>{}
                                  : std::vector<std::string>(it->second.begin(), it->second.end());
  }

  // Conjunctive filters, ordered by fetched_at desc then id, paged.
  ArticlePage query(const ArticleQuery& q) const {
    if (q.limit == 0 || q.limit > kMaxPageSize)
      throw Error(ErrorCode::MalformedFilter, "limit must be between 1 and " + std::to_string(kMaxPageSize));
    if (q.topic_min_score &&
        (q.topic_min_score->topic.empty() || !(q.topic_min_score->min_score >= 0.0 && q.topic_min_score->min_score <= 1.0)))
      throw Error(ErrorCode::MalformedFilter, "topic filter needs a topic name and a threshold in [0, 1]");
    std::vector<std::string> needle;
    if (q.text_query && !q.text_query->empty()) {
      needle = unicode::tokenize(*q.text_query);
      if (needle.empty()) throw Error(ErrorCode::MalformedFilter, "text query has no searchable tokens");
    }

    std::shared_lock lock(data_mu_);
    // Narrow with the most selective index, then check every filter.
    const std::set<std::string>* candidates = nullptr;
    if (q.class_label) {
      auto it = by_class_.find(*q.class_label);
      candidates = it == by_class_.end() ? &empty_ : &it->second;
    }
    if (q.source_id) {
      auto it = by_source_.find(*q.source_id);
      const auto* s = it == by_source_.end() ? &empty_ : &it->second;
      if (!candidates || s->size() < candidates->size()) candidates = s;
    }
    auto matches = [&](const Article& a) {
      if (q.class_label && a.class_label != q.class_label) return false;
      if (q.source_id && a.source_id != *q.source_id) return false;
      if (q.topic_min_score) {
        auto it = a.topic_scores.find(q.topic_min_score->topic);
        if (it == a.topic_scores.end() || it->second < q.topic_min_score->min_score) return false;
      }
      if (!needle.empty()) {
        const auto& tokens = tokens_.at(a.id);
        for (const auto& t : needle)
          if (!tokens.contains(t)) return false;
      }
      return true;
    };
    std::vector<OrderKey> hits;
    if (candidates) {
      for (const auto& id : *candidates) {
        const auto& a = articles_.at(id);
        if (matches(a)) hits.emplace_back(a.fetched_at, a.id);
      }
      std::sort(hits.begin(), hits.end(), NewestFirst{});
    } else {
      for (const auto& key : order_)
        if (matches(articles_.at(key.second))) hits.push_back(key);
    }
    ArticlePage page;
    page.total = hits.size();
    for (std::size_t i = q.offset; i < hits.size() && page.items.size() < q.limit; ++i)
      page.items.push_back(articles_.at(hits[i].second));
    return page;
  }

  std::vector<LabelRecord> labels() const {
    std::shared_lock lock(data_mu_);
    return labels_;
  }

  // Latest operator label per article.
  std::map<std::string, std::string> operator_labels() const {
    std::shared_lock lock(data_mu_);
    std::map<std::string, std::string> out;
    for (const auto& l : labels_)
      if (l.origin == LabelOrigin::Operator) out[l.article_id] = l.class_label;
    return out;
  }

  std::optional<TranslationJob> job(const std::string& id) const {
    std::shared_lock lock(data_mu_);
    auto it = jobs_index_.find(id);
    if (it == jobs_index_.end()) return std::nullopt;
    return jobs_[it->second];
  }

  std::vector<TranslationJob> jobs() const {
    std::shared_lock lock(data_mu_);
    return jobs_;
  }

  std::optional<PipelineRun> latest_run() const {
    std::shared_lock lock(data_mu_);
    if (runs_.empty()) return std::nullopt;
    return runs_.back();
  }

  std::vector<PipelineRun> runs() const {
    std::shared_lock lock(data_mu_);
    return runs_;
  }

  // --- writes ---

  // False (and nothing written) when the id or body hash is already stored.
  bool append_article(Article a) {
    bool added = false;
    with_write_lock([&] {
      {
        std::shared_lock lock(data_mu_);
        if (articles_.contains(a.id) || hashes_.contains(a.dedup_hash)) return;
      }
      a.class_label.reset();
      append_line(articles_log_, ingest::to_json(a));
      added = true;
    });
    return added;
  }

  void append_label(const LabelRecord& label) {
    with_write_lock([&] {
      {
        std::shared_lock lock(data_mu_);
        if (!articles_.contains(label.article_id))
          throw Error(ErrorCode::UnknownArticle, "no article with id '" + label.article_id + "'");
      }
      append_line(labels_log_, to_json(label));
    });
  }

  // Several labels under one lock acquisition.
  void append_labels(const std::vector<LabelRecord>& labels) {
    if (labels.empty()) return;
    with_write_lock([&] {
      std::ofstream out(labels_log_.path, std::ios::binary | std::ios::app);
      if (!out) throw Error(ErrorCode::Io, "cannot append to " + labels_log_.path.string());
      for (const auto& l : labels) out << to_json(l).dump() << '\n';
      out.flush();
    });
  }

  // Assigns the next job id and persists the job.
  TranslationJob append_job(TranslationJob job) {
    with_write_lock([&] {
      {
        std::shared_lock lock(data_mu_);
        job.id = next_id("job-", jobs_.size());
      }
      append_line(jobs_log_, translator::to_json(job));
    });
    return job;
  }

  PipelineRun append_run(PipelineRun run) {
    with_write_lock([&] {
      {
        std::shared_lock lock(data_mu_);
        run.run_id = next_id("run-", runs_.size());
      }
      append_line(runs_log_, to_json(run));
    });
    return run;
  }

 private:
  struct LogFile {
    std::filesystem::path path;
    std::uintmax_t offset = 0;
    std::size_t line_no = 0;
  };

  using OrderKey = std::pair<Timestamp, std::string>;
  struct NewestFirst {
    bool operator()(const OrderKey& a, const OrderKey& b) const {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    }
  };

  static std::string next_id(std::string_view prefix, std::size_t count) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06zu", count + 1);
    return std::string(prefix) + buf;
  }

  // Consumes complete lines past the saved offset.
  template <class OnRecord>
  static void tail(LogFile& log, OnRecord&& on_record) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(log.path, ec);
    if (ec || size <= log.offset) return;
    std::ifstream in(log.path, std::ios::binary);
    in.seekg(static_cast<std::streamoff>(log.offset));
    std::string chunk(size - log.offset, '\0');
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    chunk.resize(static_cast<std::size_t>(in.gcount()));
    std::size_t start = 0;
    for (auto nl = chunk.find('\n'); nl != std::string::npos; nl = chunk.find('\n', start)) {
      const std::string_view line(chunk.data() + start, nl - start);
      ++log.line_no;
      if (!line.empty()) {
        try {
          on_record(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::StoreCorrupt,
                      log.path.string() + " line " + std::to_string(log.line_no) + ": " + e.what());
        }
      }
      start = nl + 1;
      log.offset += line.size() + 1;
    }
  }

  void apply_article(Article a) {
    hashes_.insert(a.dedup_hash);
    by_source_[a.source_id].insert(a.id);
    order_.emplace(a.fetched_at, a.id);
    const auto tokens = unicode::tokenize(ingest::searchable_text(a));
    tokens_[a.id] = std::unordered_set<std::string>(tokens.begin(), tokens.end());
    if (auto it = latest_label_.find(a.id); it != latest_label_.end()) {
      a.class_label = it->second;
      by_class_[it->second].insert(a.id);
    }
    articles_[a.id] = std::move(a);
  }

  void apply_label(LabelRecord l) {
    auto it = articles_.find(l.article_id);
    if (it != articles_.end()) {
      if (it->second.class_label) by_class_[*it->second.class_label].erase(l.article_id);
      it->second.class_label = l.class_label;
      by_class_[l.class_label].insert(l.article_id);
    }
    latest_label_[l.article_id] = l.class_label;
    labels_.push_back(std::move(l));
  }

  void append_line(LogFile& log, const nlohmann::json& record) {
    std::ofstream out(log.path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + log.path.string());
    out << record.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed on " + log.path.string());
  }

  // Drops bytes past the last complete line; only called under the lock.
  void truncate_partial(LogFile& log) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(log.path, ec);
    if (!ec && size > log.offset) std::filesystem::resize_file(log.path, log.offset);
  }

  template <class F>
  void with_write_lock(F&& write) {
    std::lock_guard guard(write_mu_);
    FileLock lock(dir_ / "LOCK");
    refresh();
    for (auto* log : {&articles_log_, &labels_log_, &jobs_log_, &runs_log_}) truncate_partial(*log);
    write();
    refresh();
  }

  std::filesystem::path dir_;
  LogFile articles_log_, labels_log_, jobs_log_, runs_log_;

  mutable std::shared_mutex data_mu_;
  std::mutex write_mu_;

  std::unordered_map<std::string, Article> articles_;
  std::unordered_set<std::uint64_t> hashes_;
  std::set<OrderKey, NewestFirst> order_;
  std::map<std::string, std::set<std::string>> by_class_;
  std::map<std::string, std::set<std::string>> by_source_;
  std::unordered_map<std::string, std::unordered_set<std::string>> tokens_;
  std::unordered_map<std::string, std::string> latest_label_;
  std::vector<LabelRecord> labels_;
  std::vector<TranslationJob> jobs_;
  std::unordered_map<std::string, std::size_t> jobs_index_;
  std::vector<PipelineRun> runs_;
  const std::set<std::string> empty_;
};

}  // namespace newsdesk::service
