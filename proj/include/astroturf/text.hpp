#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace astroturf {

/// UTF-8 and character-class utilities for the Turkish target corpus.
///
/// Case folding is locale-independent and Turkish-aware: 'I' folds to the
/// dotless 'ı' (U+0131) and 'İ' (U+0130) folds to 'i'. Coverage is the Latin
/// blocks (ASCII, Latin-1 Supplement, Latin Extended-A/B) which span Turkish
/// and the Latin-script text seen in trend names; other codepoints fold to
/// themselves.

using Codepoint = std::uint32_t;

constexpr Codepoint kReplacementChar = 0xFFFD;

/// Decodes one UTF-8 codepoint starting at `i`, advancing `i`. Malformed
/// bytes decode to U+FFFD and advance by one byte.
inline Codepoint decode_utf8(std::string_view s, size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    auto cont = [&](size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        Codepoint cp = (static_cast<Codepoint>(b0 & 0x1F) << 6) |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        i += 2;
        return cp >= 0x80 ? cp : kReplacementChar;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        Codepoint cp = (static_cast<Codepoint>(b0 & 0x0F) << 12) |
                       ((static_cast<Codepoint>(s[i + 1]) & 0x3F) << 6) |
                       (static_cast<Codepoint>(s[i + 2]) & 0x3F);
        i += 3;
        return cp >= 0x800 ? cp : kReplacementChar;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        Codepoint cp = (static_cast<Codepoint>(b0 & 0x07) << 18) |
                       ((static_cast<Codepoint>(s[i + 1]) & 0x3F) << 12) |
                       ((static_cast<Codepoint>(s[i + 2]) & 0x3F) << 6) |
                       (static_cast<Codepoint>(s[i + 3]) & 0x3F);
        i += 4;
        return (cp >= 0x10000 && cp <= 0x10FFFF) ? cp : kReplacementChar;
    }
    i += 1;
    return kReplacementChar;
}

inline void encode_utf8(Codepoint cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::vector<Codepoint> to_codepoints(std::string_view s) {
    std::vector<Codepoint> cps;
    cps.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) cps.push_back(decode_utf8(s, i));
    return cps;
}

/// Turkish-aware lowercase fold of a single codepoint.
inline Codepoint fold_codepoint(Codepoint cp) {
    if (cp == 'I') return 0x0131;  // dotless ı
    if (cp == 0x0130) return 'i';  // İ
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    // Latin-1 Supplement uppercase (excluding multiplication sign).
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    // Latin Extended-A: mostly even/odd case pairs.
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;  // Ÿ → ÿ
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

inline bool is_upper_letter(Codepoint cp) {
    return fold_codepoint(cp) != cp;
}

inline bool is_lower_letter(Codepoint cp) {
    if (cp >= 'a' && cp <= 'z') return true;
    if (cp == 0x0131) return true;                           // ı
    if (cp >= 0xDF && cp <= 0xFF && cp != 0xF7) return true; // Latin-1 lowercase, excl ÷
    if (cp >= 0x100 && cp <= 0x17F) return !is_upper_letter(cp);
    if (cp >= 0x180 && cp <= 0x24F) return true; // Latin Extended-B, treated caseless
    return false;
}

/// Alphabetic under the Latin coverage above. Codepoints outside it (CJK,
/// Arabic, symbols) report false, which matches the classifier's bias toward
/// the Turkish lexicon.
inline bool is_alphabetic(Codepoint cp) {
    return is_lower_letter(cp) || is_upper_letter(cp);
}

inline bool is_ascii_digit(Codepoint cp) {
    return cp >= '0' && cp <= '9';
}

inline bool is_whitespace(Codepoint cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0x00A0;
}

/// Pragmatic emoji set: the pictograph planes plus the joiners and selectors
/// that ride along with them.
inline bool is_emoji(Codepoint cp) {
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return true; // pictographs, emoticons, transport, ext
    if (cp >= 0x2600 && cp <= 0x27BF) return true;   // misc symbols + dingbats
    if (cp >= 0x2B00 && cp <= 0x2BFF) return true;   // stars, arrows (⭐ etc.)
    if (cp >= 0x1F1E6 && cp <= 0x1F1FF) return true; // regional indicators
    if (cp == 0xFE0F || cp == 0xFE0E) return true;   // variation selectors
    if (cp == 0x200D || cp == 0x20E3) return true;   // ZWJ, keycap
    return false;
}

/// Turkish-aware lowercase fold of a whole string.
inline std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) encode_utf8(fold_codepoint(decode_utf8(s, i)), out);
    return out;
}

/// Maximal whitespace-separated runs.
inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    size_t i = 0;
    while (i < s.size()) {
        Codepoint cp = decode_utf8(s, i);
        if (is_whitespace(cp)) {
            if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            encode_utf8(cp, cur);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

} // namespace astroturf
