#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/features/lexicon.hpp"
#include "newsdesk/ingest/article.hpp"
#include "newsdesk/time.hpp"

// Seeded generator for the synthetic labeled corpus: six feeds of ten
// articles, one editorial topic per article, every word covered by the
// shipped glossary.
namespace newsdesk::service::fixtures {

inline constexpr std::string_view kFixtureHost = "https://fixtures.newsdesk.test/";
inline constexpr std::uint64_t kDefaultSeed = 7;
inline constexpr std::size_t kArticlesPerFeed = 10;

struct TopicWords {
  std::string topic;
  std::vector<std::string> nouns;   // used in generated text
  std::vector<std::string> extras;  // lexicon-only terms
};

inline const std::vector<TopicWords>& topic_words() {
  static const std::vector<TopicWords> words{
      {"employment",
       {"jobs", "workers", "wages", "hiring", "employers", "unemployment", "salary", "training", "union", "careers"},
       {"employment", "job", "labor", "workplace", "shifts"}},
      {"immigration",
       {"immigration", "visas", "citizenship", "asylum", "deportation", "border", "naturalization", "documents",
        "lawyers", "migrants"},
       {"immigrants", "visa", "diaspora", "refugees", "consulate"}},
      {"future-goals",
       {"education", "students", "college", "scholarships", "goals", "youth", "graduates", "savings",
        "entrepreneurs", "mentorship"},
       {"future", "school", "dreams", "business", "plans"}},
      {"housing",
       {"housing", "rent", "tenants", "landlords", "apartments", "eviction", "leases", "shelters", "mortgages",
        "repairs"},
       {"affordable", "homeless", "building", "units", "neighborhood"}},
      {"healthcare",
       {"healthcare", "hospitals", "clinics", "doctors", "insurance", "medicaid", "patients", "vaccines", "nurses",
        "treatment"},
       {"health", "mental", "care", "medicine", "coverage"}},
      {"politics",
       {"elections", "voters", "council", "mayor", "candidates", "campaigns", "ballots", "policy", "legislation",
        "senators"},
       {"politics", "vote", "district", "assembly", "government"}},
  };
  return words;
}

// English -> Bangla for every word the generator can emit.
inline const std::vector<std::pair<std::string, std::string>>& glossary_entries() {
  static const std::vector<std::pair<std::string, std::string>> entries{
      // employment
      {"jobs", "চাকরি"}, {"job", "চাকরি"}, {"workers", "শ্রমিক"}, {"wages", "মজুরি"}, {"hiring", "নিয়োগ"},
      {"employers", "নিয়োগকর্তা"}, {"unemployment", "বেকারত্ব"}, {"salary", "বেতন"}, {"training", "প্রশিক্ষণ"},
      {"union", "ইউনিয়ন"}, {"careers", "পেশা"}, {"employment", "কর্মসংস্থান"}, {"labor", "শ্রম"},
      {"workplace", "কর্মস্থল"}, {"shifts", "পালা"},
      // immigration
      {"immigration", "অভিবাসন"}, {"visas", "ভিসা"}, {"visa", "ভিসা"}, {"citizenship", "নাগরিকত্ব"},
      {"asylum", "আশ্রয়"}, {"deportation", "নির্বাসন"}, {"border", "সীমান্ত"}, {"naturalization", "দেশীয়করণ"},
      {"documents", "নথিপত্র"}, {"lawyers", "আইনজীবী"}, {"migrants", "অভিবাসী"}, {"immigrants", "অভিবাসী"},
      {"diaspora", "প্রবাসী"}, {"refugees", "শরণার্থী"}, {"consulate", "কনস্যুলেট"},
      // future goals
      {"education", "শিক্ষা"}, {"students", "শিক্ষার্থী"}, {"college", "কলেজ"}, {"scholarships", "বৃত্তি"},
      {"goals", "লক্ষ্য"}, {"youth", "তরুণ"}, {"graduates", "স্নাতক"}, {"savings", "সঞ্চয়"},
      {"entrepreneurs", "উদ্যোক্তা"}, {"mentorship", "পরামর্শদান"}, {"future", "ভবিষ্যৎ"}, {"school", "স্কুল"},
      {"dreams", "স্বপ্ন"}, {"business", "ব্যবসা"}, {"plans", "পরিকল্পনা"},
      // housing
      {"housing", "আবাসন"}, {"rent", "ভাড়া"}, {"tenants", "ভাড়াটে"}, {"landlords", "বাড়িওয়ালা"},
      {"apartments", "অ্যাপার্টমেন্ট"}, {"eviction", "উচ্ছেদ"}, {"leases", "ইজারা"}, {"shelters", "আশ্রয়কেন্দ্র"},
      {"mortgages", "বন্ধক"}, {"repairs", "মেরামত"}, {"affordable", "সাশ্রয়ী"}, {"homeless", "গৃহহীন"},
      {"building", "ভবন"}, {"units", "ইউনিট"}, {"neighborhood", "পাড়া"},
      // healthcare
      {"healthcare", "স্বাস্থ্যসেবা"}, {"hospitals", "হাসপাতাল"}, {"clinics", "ক্লিনিক"}, {"doctors", "ডাক্তার"},
      {"insurance", "বীমা"}, {"medicaid", "মেডিকেইড"}, {"patients", "রোগী"}, {"vaccines", "টিকা"},
      {"nurses", "নার্স"}, {"treatment", "চিকিৎসা"}, {"health", "স্বাস্থ্য"}, {"mental", "মানসিক"},
      {"care", "যত্ন"}, {"medicine", "ওষুধ"}, {"coverage", "কভারেজ"},
      // politics
      {"elections", "নির্বাচন"}, {"voters", "ভোটার"}, {"council", "কাউন্সিল"}, {"mayor", "মেয়র"},
      {"candidates", "প্রার্থী"}, {"campaigns", "প্রচারণা"}, {"ballots", "ব্যালট"}, {"policy", "নীতি"},
      {"legislation", "আইন"}, {"senators", "সিনেটর"}, {"politics", "রাজনীতি"}, {"vote", "ভোট"},
      {"district", "জেলা"}, {"assembly", "পরিষদ"}, {"government", "সরকার"},
      // shared vocabulary
      {"a", "একটি"}, {"about", "সম্পর্কে"}, {"after", "পরে"}, {"along", "পাশাপাশি"}, {"among", "মধ্যে"}, {"and", "এবং"},
      {"are", "হচ্ছে"}, {"asked", "চেয়েছেন"}, {"bangladeshi", "বাংলাদেশি"}, {"better", "উন্নত"},
      {"city", "শহর"}, {"community", "সম্প্রদায়"}, {"complaints", "অভিযোগ"}, {"concern", "উদ্বেগ"},
      {"english", "ইংরেজি"}, {"experts", "বিশেষজ্ঞ"}, {"families", "পরিবার"}, {"fluently", "সাবলীলভাবে"},
      {"for", "জন্য"}, {"found", "পেয়েছে"}, {"from", "থেকে"}, {"groups", "সংগঠন"}, {"help", "সাহায্য"},
      {"in", "মধ্যে"}, {"is", "হলো"}, {"last", "গত"}, {"leaders", "নেতা"}, {"legal", "বৈধ"}, {"live", "বাস করেন"},
      {"lived", "বাস করতেন"}, {"local", "স্থানীয়"}, {"many", "অনেক"}, {"matter", "গুরুত্বপূর্ণ"},
      {"meetings", "সভা"}, {"more", "আরও"}, {"new", "নতুন"}, {"now", "এখন"}, {"of", "এর"},
      {"officials", "কর্মকর্তা"}, {"on", "উপর"}, {"only", "মাত্র"}, {"people", "মানুষ"}, {"populations", "জনগোষ্ঠী"}, {"percent", "শতাংশ"},
      {"planning", "পরিকল্পনা করছে"}, {"report", "প্রতিবেদন"}, {"residents", "বাসিন্দা"}, {"review", "পর্যালোচনা"},
      {"rules", "নিয়ম"}, {"said", "বলেছেন"}, {"speak", "বলেন"}, {"states", "রাষ্ট্র"}, {"than", "চেয়ে"},
      {"the", "এই"}, {"these", "এসব"}, {"this", "এই"}, {"top", "প্রধান"}, {"united", "যুক্ত"}, {"update", "হালনাগাদ"},
      {"want", "চান"}, {"week", "সপ্তাহ"}, {"will", "করবে"}, {"with", "সাথে"}, {"year", "বছর"},
      // places
      {"astoria", "অ্যাস্টোরিয়া"}, {"bronx", "ব্রংকস"}, {"brooklyn", "ব্রুকলিন"}, {"heights", "হাইটস"},
      {"jackson", "জ্যাকসন"}, {"manhattan", "ম্যানহাটন"}, {"queens", "কুইন্স"}, {"york", "ইয়র্ক"},
  };
  return entries;
}

inline nlohmann::json glossary_json() {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [en, bn] : glossary_entries()) j[en] = bn;
  return j;
}

inline std::vector<features::TopicLexicon> default_lexicons() {
  std::vector<features::TopicLexicon> out;
  for (const auto& tw : topic_words()) {
    features::TopicLexicon lex;
    lex.topic = tw.topic;
    for (const auto& w : tw.nouns) lex.terms[w] = 1.0;
    for (const auto& w : tw.extras) lex.terms[w] = 1.0;
    out.push_back(std::move(lex));
  }
  return out;
}

struct FixtureSource {
  std::string id;
  std::string name;
  bool atom;
};

inline const std::vector<FixtureSource>& fixture_sources() {
  static const std::vector<FixtureSource> sources{
      {"metro-ledger", "Metro Ledger", false},     {"harbor-tribune", "Harbor Tribune", true},
      {"five-borough-post", "Five Borough Post", false}, {"civic-wire", "Civic Wire", true},
      {"community-dispatch", "Community Dispatch", false}, {"gotham-report", "Gotham Report", true},
  };
  return sources;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

inline std::string rfc822(Timestamp t) {
  const auto secs = std::chrono::floor<std::chrono::seconds>(t);
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  static constexpr const char* kDays[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d GMT", kDays[tm.tm_wday], tm.tm_mday,
                kMonths[tm.tm_mon], tm.tm_year + 1900, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

// Portable draws: mt19937_64 output is fully specified, distributions are not.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

  std::string number() {
    const std::size_t n = 2 + below(900);
    if (below(4) != 0) return std::to_string(n);
    return std::to_string(1 + below(90)) + "," + std::to_string(100 + below(900));
  }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<std::string>& places() {
  static const std::vector<std::string> p{"Queens", "Brooklyn", "the Bronx", "Jackson Heights", "Manhattan",
                                          "Astoria"};
  return p;
}

inline std::string fill(std::string_view tmpl, const std::map<char, std::string>& slots) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      out += slots.at(tmpl[i + 1]);
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

inline const std::vector<std::string>& sentence_templates() {
  static const std::vector<std::string> t{
      "Officials in {p} said {a} and {b} will help {n} families this year.",
      "A new report on {a} in {p} found {k} percent more {b} than last year.",
      "Community leaders want better {a} and more {b} for Bangladeshi residents.",
      "Local groups in {p} are planning meetings about {a}, {b} and {c}.",
      "Many families said {a} is now a top concern, along with {b}.",
      "The city will review {a} and {c} rules after {n} complaints from residents.",
      "Residents of {p} asked officials for more {a} and {b} this week.",
      "Experts said {a} and {b} matter for {n} people in the community.",
  };
  return t;
}

inline const std::vector<std::string>& title_templates() {
  static const std::vector<std::string> t{
      "{A} and {b} in {p}",
      "New report on {a} for {p} families",
      "{A} update: {b} and {c}",
      "Residents of {p} want more {a}",
  };
  return t;
}

}  // namespace detail

struct GeneratedArticle {
  std::string source_id;
  std::string slug;
  std::string url;
  std::string topic;
  std::string title;
  std::vector<std::string> paragraphs;
  Timestamp published_at;
};

inline std::vector<GeneratedArticle> generate_articles(std::uint64_t seed) {
  detail::Draw draw(seed);
  const auto& topics = topic_words();
  const auto& sources = fixture_sources();
  std::vector<GeneratedArticle> out;
  std::set<std::uint64_t> hashes;
  const Timestamp base = *parse_iso8601("2024-03-01T08:00:00Z");
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (std::size_t k = 0; k < kArticlesPerFeed; ++k) {
      const std::size_t index = s * kArticlesPerFeed + k;
      const auto& tw = topics[(index + s) % topics.size()];
      GeneratedArticle a;
      a.source_id = sources[s].id;
      char slug[96];
      std::snprintf(slug, sizeof slug, "%s-%02zu", sources[s].id.c_str(), k + 1);
      a.slug = slug;
      a.url = std::string(kFixtureHost) + "articles/" + a.slug + ".html";
      a.topic = tw.topic;
      a.published_at = base + std::chrono::minutes(97 * static_cast<long>(index));

      auto three_nouns = [&] {
        std::vector<std::string> picked;
        while (picked.size() < 3) {
          const auto& w = draw.pick(tw.nouns);
          if (std::find(picked.begin(), picked.end(), w) == picked.end()) picked.push_back(w);
        }
        return picked;
      };
      {
        const auto nouns = three_nouns();
        a.title = detail::fill(draw.pick(detail::title_templates()),
                               {{'A', detail::capitalize(nouns[0])}, {'a', nouns[0]}, {'b', nouns[1]}, {'c', nouns[2]},
                                {'p', draw.pick(detail::places())}});
      }
      const std::size_t noisy_paragraph = draw.below(4);
      for (std::size_t p = 0; p < 4; ++p) {
        std::string paragraph;
        for (std::size_t sentence = 0; sentence < 2; ++sentence) {
          auto nouns = three_nouns();
          if (p == noisy_paragraph && sentence == 1) {
            const auto& other = topics[(draw.below(topics.size() - 1) + 1 + (index + s)) % topics.size()];
            nouns[2] = draw.pick(other.nouns);
          }
          auto text = detail::fill(draw.pick(detail::sentence_templates()),
                                   {{'a', nouns[0]}, {'b', nouns[1]}, {'c', nouns[2]},
                                    {'p', draw.pick(detail::places())}, {'n', draw.number()},
                                    {'k', std::to_string(3 + draw.below(60))}});
          if (!paragraph.empty()) paragraph.push_back(' ');
          paragraph += text;
        }
        if (p == 0 && tw.topic == "immigration" && k % 3 == 0)
          paragraph += " In 2019, 208,000 legal Bangladeshi immigrants lived in the United States. Among these "
                       "populations, 93,000 live in New York City. Only 55 percent of Bangladeshi immigrants speak "
                       "English fluently.";
        a.paragraphs.push_back(std::move(paragraph));
      }
      std::string body;
      for (const auto& p : a.paragraphs) body += p + "\n";
      if (!hashes.insert(ingest::dedup_key(body)).second)
        throw Error(ErrorCode::InvalidConfig, "fixture generator produced a duplicate body; choose another seed");
      out.push_back(std::move(a));
    }
  }
  return out;
}

inline std::string render_page(const GeneratedArticle& a, const FixtureSource& source) {
  std::string html;
  html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  html += "<title>" + detail::xml_escape(a.title) + " | " + source.name + "</title>\n";
  html += "<style>body { font-family: Georgia, serif; }</style>\n";
  html += "<script>window.dataLayer = window.dataLayer || []; dataLayer.push({page: \"" + a.slug + "\"});</script>\n";
  html += "</head>\n<body>\n";
  html += "<nav class=\"site-nav\"><a href=\"/\">Home</a> | <a href=\"/politics\">Politics</a> | "
          "<a href=\"/housing\">Housing</a> | <a href=\"/jobs\">Jobs</a> | <a href=\"/subscribe\">Subscribe</a></nav>\n";
  html += "<main>\n<article>\n<header><h1>" + detail::xml_escape(a.title) + "</h1><p class=\"byline\">Staff of " +
          source.name + "</p></header>\n";
  for (const auto& p : a.paragraphs) html += "<p>" + detail::xml_escape(p) + "</p>\n";
  html += "</article>\n</main>\n";
  html += "<aside><h2>Most read</h2><ul><li>Subscribe today</li></ul></aside>\n";
  html += "<footer>Copyright 2024 " + source.name + ". All rights reserved.</footer>\n";
  html += "</body>\n</html>\n";
  return html;
}

inline std::string render_feed(const FixtureSource& source, const std::vector<GeneratedArticle>& articles) {
  const std::string home = std::string(kFixtureHost) + source.id + "/";
  std::string xml = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (source.atom) {
    xml += "<feed xmlns=\"http://www.w3.org/2005/Atom\">\n";
    xml += "  <title>" + source.name + "</title>\n  <id>" + home + "</id>\n";
    xml += "  <link rel=\"self\" href=\"" + std::string(kFixtureHost) + "feeds/" + source.id + ".xml\"/>\n";
    xml += "  <updated>2024-03-08T00:00:00Z</updated>\n";
    for (const auto& a : articles) {
      xml += "  <entry>\n    <title>" + detail::xml_escape(a.title) + "</title>\n";
      xml += "    <link rel=\"alternate\" href=\"" + a.url + "\"/>\n";
      xml += "    <id>" + a.url + "</id>\n";
      xml += "    <published>" + format_iso8601(a.published_at) + "</published>\n";
      xml += "    <updated>" + format_iso8601(a.published_at) + "</updated>\n  </entry>\n";
    }
    xml += "</feed>\n";
  } else {
    xml += "<rss version=\"2.0\">\n<channel>\n";
    xml += "  <title>" + source.name + "</title>\n  <link>" + home + "</link>\n";
    xml += "  <description>Local news from " + source.name + "</description>\n";
    for (const auto& a : articles) {
      xml += "  <item>\n    <title>" + detail::xml_escape(a.title) + "</title>\n";
      xml += "    <link>" + a.url + "</link>\n    <guid>" + a.url + "</guid>\n";
      xml += "    <pubDate>" + detail::rfc822(a.published_at) + "</pubDate>\n  </item>\n";
    }
    xml += "</channel>\n</rss>\n";
  }
  return xml;
}

// Relative path -> file content for the whole fixture tree.
inline std::map<std::string, std::string> generate_fixture_files(std::uint64_t seed = kDefaultSeed) {
  std::map<std::string, std::string> files;
  const auto articles = generate_articles(seed);

  nlohmann::json sources = nlohmann::json::array();
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& src : fixture_sources()) {
    std::vector<GeneratedArticle> own;
    for (const auto& a : articles)
      if (a.source_id == src.id) own.push_back(a);
    files["feeds/" + src.id + ".xml"] = render_feed(src, own);
    for (const auto& a : own) {
      files["articles/" + a.slug + ".html"] = render_page(a, src);
      labels[a.url] = a.topic;
    }
    sources.push_back({{"id", src.id},
                       {"name", src.name},
                       {"feed_url", std::string(kFixtureHost) + "feeds/" + src.id + ".xml"},
                       {"homepage_url", std::string(kFixtureHost) + src.id + "/"},
                       {"language", "en"},
                       {"republish_permitted", true},
                       {"license_note", "Synthetic fixture source; republication and translation permitted."},
                       {"enabled", true}});
  }
  files["sources.json"] = sources.dump(2) + "\n";
  files["labels.json"] = labels.dump(2) + "\n";
  files["lexicons.json"] = features::to_json(default_lexicons()).dump(2) + "\n";
  files["glossary.json"] = glossary_json().dump(2) + "\n";

  nlohmann::json config{
      {"sources_path", "sources.json"},
      {"lexicons_path", "lexicons.json"},
      {"glossary_path", "glossary.json"},
      {"fixture_labels_path", "labels.json"},
      {"store_dir", "store"},
      {"feature_mode", "topic_relevance"},
      {"classifier_hyper", {{"learning_rate", 0.5}, {"epochs", 500}, {"l2_lambda", 1e-4}, {"seed", 0}, {"tolerance", 1e-9}}},
      {"url_mirrors", {{std::string(kFixtureHost), "."}}},
      {"backends",
       nlohmann::json::array(
           {{{"id", "mock"}, {"kind", "mock_glossary"}, {"max_chunk_chars", 1500}, {"max_retries", 0}},
            {{"id", "llm"},
             {"kind", "remote_llm"},
             {"endpoint", "http://127.0.0.1:8089/v1/translate"},
             {"model_name", "bangla-news-translator"},
             {"prompt_template",
              "Translate this English news text into Bangla. Keep every number and proper noun.\n\n{text}"},
             {"max_chunk_chars", 1500},
             {"timeout_ms", 30000},
             {"max_retries", 2},
             {"response_path", "text"}}})}};
  files["newsdesk.json"] = config.dump(2) + "\n";
  return files;
}

inline void write_fixture_files(const std::filesystem::path& dir, std::uint64_t seed = kDefaultSeed) {
  for (const auto& [rel, content] : generate_fixture_files(seed)) {
    const auto path = dir / rel;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
  }
}

}  // namespace newsdesk::service::fixtures
