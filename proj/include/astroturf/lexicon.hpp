#pragma once

#include <set>
#include <string>
#include <vector>

#include "astroturf/stream.hpp"
#include "astroturf/text.hpp"
#include "astroturf/trends.hpp"

namespace astroturf {

/// Rule-based classifier for lexicon tweets: machine-generated texts built
/// from random lexicon words with the target keyword appended. A tweet is a
/// lexicon tweet when, after stripping the trend mentions:
///   1. it has between 2 and 9 tokens (emojis excluded),
///   2. it begins with a lowercase letter,
///   3. its tokens are alphabetic only, apart from parentheses (emojis are
///      stripped beforehand).

enum class LexiconRule { token_count, lowercase_start, alphabetic_only };

struct LexiconVerdict {
    bool is_lexicon = false;
    std::set<LexiconRule> failed_rules;
};

struct TokenizedTweet {
    std::vector<std::string> tokens; // emoji-free, mention-free
    int emoji_count = 0;
    std::string stripped_text; // original tokens minus trend mentions
};

constexpr int kMinLexiconTokens = 2;
constexpr int kMaxLexiconTokens = 9;

namespace detail {

inline std::string strip_emoji(const std::string& token, int& emoji_count) {
    std::string out;
    size_t i = 0;
    while (i < token.size()) {
        Codepoint cp = decode_utf8(token, i);
        if (is_emoji(cp)) {
            ++emoji_count;
        } else {
            encode_utf8(cp, out);
        }
    }
    return out;
}

} // namespace detail

/// Splits on whitespace after removing trend mentions. Emoji-only tokens are
/// counted and excluded; emojis inside mixed tokens are stripped.
inline TokenizedTweet tokenize(std::string_view text, const std::vector<std::string>& trend_mentions) {
    TokenizedTweet out;
    std::vector<std::string> raw = split_whitespace(text);

    std::vector<bool> consumed(raw.size(), false);
    if (!trend_mentions.empty()) {
        std::vector<std::string> folded;
        folded.reserve(raw.size());
        for (const auto& tok : raw) folded.push_back(fold_case(tok));
        TrendMatcher matcher(std::set<std::string>(trend_mentions.begin(), trend_mentions.end()));
        consumed = matcher.consumed_mask(folded);
    }

    for (size_t i = 0; i < raw.size(); ++i) {
        if (consumed[i]) continue;
        if (!out.stripped_text.empty()) out.stripped_text.push_back(' ');
        out.stripped_text += raw[i];
        std::string cleaned = detail::strip_emoji(raw[i], out.emoji_count);
        if (!cleaned.empty()) out.tokens.push_back(std::move(cleaned));
    }
    return out;
}

/// First codepoint of the stripped text, skipping whitespace and emoji.
inline std::optional<Codepoint> first_visible_codepoint(std::string_view stripped_text) {
    size_t i = 0;
    while (i < stripped_text.size()) {
        Codepoint cp = decode_utf8(stripped_text, i);
        if (is_whitespace(cp) || is_emoji(cp)) continue;
        return cp;
    }
    return std::nullopt;
}

inline LexiconVerdict is_lexicon_tweet(std::string_view text, const std::vector<std::string>& trend_mentions) {
    TokenizedTweet tok = tokenize(text, trend_mentions);
    LexiconVerdict verdict;

    const int n = static_cast<int>(tok.tokens.size());
    if (n < kMinLexiconTokens || n > kMaxLexiconTokens) {
        verdict.failed_rules.insert(LexiconRule::token_count);
    }

    auto first = first_visible_codepoint(tok.stripped_text);
    if (!first || !is_lower_letter(*first)) {
        verdict.failed_rules.insert(LexiconRule::lowercase_start);
    }

    for (const auto& token : tok.tokens) {
        size_t i = 0;
        bool ok = true;
        while (i < token.size()) {
            Codepoint cp = decode_utf8(token, i);
            if (!is_alphabetic(cp) && cp != '(' && cp != ')') {
                ok = false;
                break;
            }
        }
        if (!ok) {
            verdict.failed_rules.insert(LexiconRule::alphabetic_only);
            break;
        }
    }

    verdict.is_lexicon = verdict.failed_rules.empty();
    return verdict;
}

/// Element-wise classification. Retweets never carry generated lexicon text,
/// so they short-circuit to a failed verdict without rule evaluation; the
/// recorded rules are the ones their "RT @..." prefix violates.
inline LexiconVerdict classify_tweet(const TweetRecord& tweet, const std::vector<std::string>& trend_mentions) {
    if (tweet.is_retweet) {
        LexiconVerdict verdict;
        verdict.is_lexicon = false;
        verdict.failed_rules = {LexiconRule::lowercase_start, LexiconRule::alphabetic_only};
        return verdict;
    }
    return is_lexicon_tweet(tweet.text, trend_mentions);
}

inline std::vector<LexiconVerdict> classify_batch(
    const std::vector<std::pair<TweetRecord, std::vector<std::string>>>& tweets) {
    std::vector<LexiconVerdict> out;
    out.reserve(tweets.size());
    for (const auto& [tweet, mentions] : tweets) out.push_back(classify_tweet(tweet, mentions));
    return out;
}

inline const char* to_string(LexiconRule r) {
    switch (r) {
        case LexiconRule::token_count: return "token_count";
        case LexiconRule::lowercase_start: return "lowercase_start";
        case LexiconRule::alphabetic_only: return "alphabetic_only";
    }
    return "?";
}

} // namespace astroturf
