"""Rule-based sentence scorer over a -4..+4 valence lexicon.

Implements the five published VADER heuristics: punctuation emphasis,
all-caps emphasis, degree modifiers with distance damping, contrastive
"but" re-weighting, and negation (including special idioms and the
stand-alone "no").  Matched valences are summed and squashed to a
compound score in [-1, 1] via s / sqrt(s^2 + alpha).

The control flow is kept constant-for-constant compatible with the
reference implementation (vaderSentiment 3.3.2), including its quirks:
tokens keep attached punctuation when stripping would leave two or
fewer characters, the "but" rewrite locates sentiments by value, and
idiom boosters add raw (unsigned) increments.  A frozen suite of
reference outputs pins this behaviour in the test suite.  Emoji
descriptions are not translated; callers feed plain text.
"""

from __future__ import annotations

import math
import string

from .lexicon import Lexicon, Scale, SentimentScore

B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733
N_SCALAR = -0.74
NORMALIZATION_ALPHA = 15

NEGATE = frozenset(
    [
        "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
        "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
        "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
        "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
        "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
        "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
        "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
        "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom",
        "despite",
    ]
)

BOOSTER_DICT = {
    "absolutely": B_INCR, "amazingly": B_INCR, "awfully": B_INCR,
    "completely": B_INCR, "considerable": B_INCR, "considerably": B_INCR,
    "decidedly": B_INCR, "deeply": B_INCR, "effing": B_INCR,
    "enormous": B_INCR, "enormously": B_INCR, "entirely": B_INCR,
    "especially": B_INCR, "exceptional": B_INCR, "exceptionally": B_INCR,
    "extreme": B_INCR, "extremely": B_INCR, "fabulously": B_INCR,
    "flipping": B_INCR, "flippin": B_INCR, "frackin": B_INCR,
    "fracking": B_INCR, "fricking": B_INCR, "frickin": B_INCR,
    "frigging": B_INCR, "friggin": B_INCR, "fully": B_INCR,
    "fuckin": B_INCR, "fucking": B_INCR, "fuggin": B_INCR,
    "fugging": B_INCR, "greatly": B_INCR, "hella": B_INCR,
    "highly": B_INCR, "hugely": B_INCR, "incredible": B_INCR,
    "incredibly": B_INCR, "intensely": B_INCR, "major": B_INCR,
    "majorly": B_INCR, "more": B_INCR, "most": B_INCR,
    "particularly": B_INCR, "purely": B_INCR, "quite": B_INCR,
    "really": B_INCR, "remarkably": B_INCR, "so": B_INCR,
    "substantially": B_INCR, "thoroughly": B_INCR, "total": B_INCR,
    "totally": B_INCR, "tremendous": B_INCR, "tremendously": B_INCR,
    "uber": B_INCR, "unbelievably": B_INCR, "unusually": B_INCR,
    "utter": B_INCR, "utterly": B_INCR, "very": B_INCR,
    "almost": B_DECR, "barely": B_DECR, "hardly": B_DECR,
    "just enough": B_DECR, "kind of": B_DECR, "kinda": B_DECR,
    "kindof": B_DECR, "kind-of": B_DECR, "less": B_DECR,
    "little": B_DECR, "marginal": B_DECR, "marginally": B_DECR,
    "occasional": B_DECR, "occasionally": B_DECR, "partly": B_DECR,
    "scarce": B_DECR, "scarcely": B_DECR, "slight": B_DECR,
    "slightly": B_DECR, "somewhat": B_DECR, "sort of": B_DECR,
    "sorta": B_DECR, "sortof": B_DECR, "sort-of": B_DECR,
}

SPECIAL_CASES = {
    "the shit": 3, "the bomb": 3, "bad ass": 1.5, "badass": 1.5,
    "bus stop": 0.0, "yeah right": -2, "kiss of death": -1.5,
    "to die for": 3, "beating heart": 3.1, "broken heart": -2.9,
}


def negated(input_words: list[str], include_nt: bool = True) -> bool:
    input_words = [str(w).lower() for w in input_words]
    for word in input_words:
        if word in NEGATE:
            return True
    if include_nt:
        for word in input_words:
            if "n't" in word:
                return True
    return False


def normalize_valence_sum(score: float, alpha: float = NORMALIZATION_ALPHA) -> float:
    """Squash a raw valence sum to [-1, 1]."""
    norm_score = score / math.sqrt((score * score) + alpha)
    if norm_score < -1.0:
        return -1.0
    if norm_score > 1.0:
        return 1.0
    return norm_score


def allcap_differential(words: list[str]) -> bool:
    """True when some but not all words are in all caps."""
    allcap_words = sum(1 for word in words if word.isupper())
    cap_differential = len(words) - allcap_words
    return 0 < cap_differential < len(words)


def scalar_inc_dec(word: str, valence: float, is_cap_diff: bool) -> float:
    """Degree-modifier increment for one word, sign-matched to the target."""
    scalar = 0.0
    word_lower = word.lower()
    if word_lower in BOOSTER_DICT:
        scalar = BOOSTER_DICT[word_lower]
        if valence < 0:
            scalar *= -1
        if word.isupper() and is_cap_diff:
            if valence > 0:
                scalar += C_INCR
            else:
                scalar -= C_INCR
    return scalar


def _strip_punc_if_word(token: str) -> str:
    # leave short leftovers (emoticons, initialisms) untouched
    stripped = token.strip(string.punctuation)
    if len(stripped) <= 2:
        return token
    return stripped


def tokenize_keep_emoticons(text: str) -> list[str]:
    """Whitespace tokens with edge punctuation stripped off real words."""
    return [_strip_punc_if_word(token) for token in text.split()]


class _Sentiments:
    """Per-token valence assignment for one text."""

    def __init__(self, text: str, lexicon: dict[str, float]):
        self.lexicon = lexicon
        self.words_and_emoticons = tokenize_keep_emoticons(text)
        self.is_cap_diff = allcap_differential(self.words_and_emoticons)

    def run(self) -> list[float]:
        sentiments: list[float] = []
        words = self.words_and_emoticons
        for i, item in enumerate(words):
            valence = 0.0
            # modifiers and "kind of" carry no sentiment of their own
            if item.lower() in BOOSTER_DICT:
                sentiments.append(valence)
                continue
            if i < len(words) - 1 and item.lower() == "kind" and words[i + 1].lower() == "of":
                sentiments.append(valence)
                continue
            sentiments.append(self._valence_at(item, i))
        return self._but_check(sentiments)

    def _valence_at(self, item: str, i: int) -> float:
        words = self.words_and_emoticons
        item_lowercase = item.lower()
        if item_lowercase not in self.lexicon:
            return 0.0
        valence = self.lexicon[item_lowercase]

        # "no" before another lexicon word negates it instead of scoring itself
        if (
            item_lowercase == "no"
            and i != len(words) - 1
            and words[i + 1].lower() in self.lexicon
        ):
            valence = 0.0
        if (
            (i > 0 and words[i - 1].lower() == "no")
            or (i > 1 and words[i - 2].lower() == "no")
            or (
                i > 2
                and words[i - 3].lower() == "no"
                and words[i - 1].lower() in ("or", "nor")
            )
        ):
            valence = self.lexicon[item_lowercase] * N_SCALAR

        if item.isupper() and self.is_cap_diff:
            if valence > 0:
                valence += C_INCR
            else:
                valence -= C_INCR

        for start_i in range(0, 3):
            # look back up to three words, damping the modifier with distance
            if i > start_i and words[i - (start_i + 1)].lower() not in self.lexicon:
                s = scalar_inc_dec(words[i - (start_i + 1)], valence, self.is_cap_diff)
                if start_i == 1 and s != 0:
                    s = s * 0.95
                if start_i == 2 and s != 0:
                    s = s * 0.9
                valence = valence + s
                valence = self._negation_check(valence, start_i, i)
                if start_i == 2:
                    valence = self._special_idioms_check(valence, i)

        return self._least_check(valence, i)

    def _least_check(self, valence: float, i: int) -> float:
        words = self.words_and_emoticons
        if (
            i > 1
            and words[i - 1].lower() not in self.lexicon
            and words[i - 1].lower() == "least"
        ):
            if words[i - 2].lower() != "at" and words[i - 2].lower() != "very":
                valence = valence * N_SCALAR
        elif (
            i > 0
            and words[i - 1].lower() not in self.lexicon
            and words[i - 1].lower() == "least"
        ):
            valence = valence * N_SCALAR
        return valence

    def _negation_check(self, valence: float, start_i: int, i: int) -> float:
        words = [w.lower() for w in self.words_and_emoticons]
        if start_i == 0:
            if negated([words[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        if start_i == 1:
            if words[i - 2] == "never" and words[i - 1] in ("so", "this"):
                valence = valence * 1.25
            elif words[i - 2] == "without" and words[i - 1] == "doubt":
                pass
            elif negated([words[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        if start_i == 2:
            # grouping kept as published: the trailing so/this clause fires alone
            if (
                words[i - 3] == "never"
                and (words[i - 2] == "so" or words[i - 2] == "this")
                or (words[i - 1] == "so" or words[i - 1] == "this")
            ):
                valence = valence * 1.25
            elif words[i - 3] == "without" and (
                words[i - 2] == "doubt" or words[i - 1] == "doubt"
            ):
                pass
            elif negated([words[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        return valence

    def _special_idioms_check(self, valence: float, i: int) -> float:
        words = [w.lower() for w in self.words_and_emoticons]
        onezero = f"{words[i - 1]} {words[i]}"
        twoonezero = f"{words[i - 2]} {words[i - 1]} {words[i]}"
        twoone = f"{words[i - 2]} {words[i - 1]}"
        threetwoone = f"{words[i - 3]} {words[i - 2]} {words[i - 1]}"
        threetwo = f"{words[i - 3]} {words[i - 2]}"

        for seq in (onezero, twoonezero, twoone, threetwoone, threetwo):
            if seq in SPECIAL_CASES:
                valence = SPECIAL_CASES[seq]
                break

        if len(words) - 1 > i:
            zeroone = f"{words[i]} {words[i + 1]}"
            if zeroone in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroone]
        if len(words) - 1 > i + 1:
            zeroonetwo = f"{words[i]} {words[i + 1]} {words[i + 2]}"
            if zeroonetwo in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroonetwo]

        # multiword dampeners two or three back add their raw increment
        for n_gram in (threetwoone, threetwo, twoone):
            if n_gram in BOOSTER_DICT:
                valence = valence + BOOSTER_DICT[n_gram]
        return valence

    def _but_check(self, sentiments: list[float]) -> list[float]:
        words = [w.lower() for w in self.words_and_emoticons]
        if "but" in words:
            bi = words.index("but")
            for sentiment in sentiments:
                si = sentiments.index(sentiment)
                if si < bi:
                    sentiments.pop(si)
                    sentiments.insert(si, sentiment * 0.5)
                elif si > bi:
                    sentiments.pop(si)
                    sentiments.insert(si, sentiment * 1.5)
        return sentiments


def _amplify_ep(text: str) -> float:
    ep_count = min(text.count("!"), 4)
    return ep_count * 0.292


def _amplify_qm(text: str) -> float:
    qm_count = text.count("?")
    if qm_count > 1:
        return qm_count * 0.18 if qm_count <= 3 else 0.96
    return 0.0


def _sift_sentiment_scores(sentiments: list[float]) -> tuple[float, float, int]:
    # the +/-1 compensates for neutral words counting as one each
    pos_sum = sum(s + 1.0 for s in sentiments if s > 0)
    neg_sum = sum(s - 1.0 for s in sentiments if s < 0)
    neu_count = sum(1 for s in sentiments if s == 0)
    return pos_sum, neg_sum, neu_count


def score_heuristic(text: str, lexicon: Lexicon) -> SentimentScore:
    """Score raw text (case and punctuation drive the heuristics).

    compound is rounded to 4 decimals and the pos/neg/neu proportions
    to 3, matching the reference output contract.  Counts of positive
    and negative matched tokens also feed the shared polarity and
    subjectivity fields, so the two scorer families report comparably.
    """
    if lexicon.scale is not Scale.PLUS_MINUS_4:
        raise ValueError("heuristic scorer expects a plus_minus_4 lexicon")
    table = {w: v for w, v in lexicon.entries.items()}
    run = _Sentiments(text, table)
    sentiments = run.run()

    if sentiments:
        sum_s = float(sum(sentiments))
        punct_emph_amplifier = _amplify_ep(text) + _amplify_qm(text)
        if sum_s > 0:
            sum_s += punct_emph_amplifier
        elif sum_s < 0:
            sum_s -= punct_emph_amplifier
        compound = normalize_valence_sum(sum_s)

        pos_sum, neg_sum, neu_count = _sift_sentiment_scores(sentiments)
        if pos_sum > math.fabs(neg_sum):
            pos_sum += punct_emph_amplifier
        elif pos_sum < math.fabs(neg_sum):
            neg_sum -= punct_emph_amplifier
        total = pos_sum + math.fabs(neg_sum) + neu_count
        pos = math.fabs(pos_sum / total)
        neg = math.fabs(neg_sum / total)
        neu = math.fabs(neu_count / total)
    else:
        compound = pos = neg = neu = 0.0

    return SentimentScore.from_counts(
        pos_count=sum(1 for s in sentiments if s > 0),
        neg_count=sum(1 for s in sentiments if s < 0),
        token_count=len(run.words_and_emoticons),
        compound=round(compound, 4),
        pos_prop=round(pos, 3),
        neg_prop=round(neg, 3),
        neu_prop=round(neu, 3),
    )
