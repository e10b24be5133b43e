"""Freeze the heuristic-scorer parity suite.

Scores a curated sentence list with an independently authored reference
implementation (the npm vader-sentiment bundle, run via node) and with
this package's engine, verifies exact agreement, and writes the frozen
expected values to tests/data/vader_parity_suite.json.

The two implementations are known to differ on a handful of paths
(stand-alone "no", "never so/this", idiom boosters, idiom tables,
tokens of length one, multi-character trailing punctuation, capitalised
negators, value-collision "but" rewrites).  Suite sentences deliberately
stay off those paths; any disagreement this script reports means either
a sentence strayed onto one, or the engine has a bug.  Nothing is
frozen until the run is clean.

Usage: python scripts/dev/freeze_parity_suite.py /path/to/vaderSentiment.bundle.js
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

from sentikit.lexicon import bundled_vader_lexicon
from sentikit.vader import score_heuristic

REPO = Path(__file__).resolve().parents[2]
OUT_PATH = REPO / "tests" / "data" / "vader_parity_suite.json"

# bucket -> sentences; every bucket must stay non-trivially populated
CASES: dict[str, list[str]] = {
    "plain": [
        "the quarterly profit was good.",
        "shares closed higher after the strong earnings report.",
        "investors fear another crisis in the banking sector.",
        "the fund reported another heavy loss for the third quarter.",
        "regulators uncovered fraud at the lender.",
        "analysts praised the excellent results.",
        "the outlook remains gloomy for small exporters.",
        "traders welcomed the gains in metal stocks.",
        "the merger created genuine opportunity for growth.",
        "weak demand hurt margins across the sector.",
        "the committee met on tuesday to review the draft.",
        "output figures for march stayed within the forecast range.",
        "the board approved the dividend without delay.",
        "bond yields were unchanged through the afternoon session.",
        "the stock is good.",
        "the results were terrible.",
        "it was an honor to win the award.",
        "the settlement ended years of litigation misery.",
        "shareholders cheered the surprise dividend hike.",
        "the downgrade triggered panic selling.",
    ],
    "punctuation": [
        "the stock is good!",
        "the stock is good!!",
        "the stock is good!!!",
        "the stock is good!!! truly!",
        "the numbers look good!!! wow!!",
        "profits collapsed again!",
        "profits collapsed again!!!",
        "can the rally last? is it real??",
        "why did the shares crash?? who approved this deal??",
        "is the bank safe?? are deposits safe?? when will it end??",
        "what happened to the surplus?? where did it go?? who knew?? why??",
        "markets cheered the win!",
        "another dismal quarter, another loss!!",
        "the merger is great news for shareholders!!",
        "growth is back?!?",
        "the currency fell hard today?!?!",
        "an amazing turnaround!!",
        "creditors rejected the plan. sheer chaos followed!",
    ],
    "caps": [
        "the stock is GOOD.",
        "the results were an absolute DISASTER for the fund.",
        "investors cheered the HUGE profit.",
        "the lender reported an unusually GRIM outlook.",
        "MARKETS CRASH AS BANKS FAIL",
        "THE QUARTER WAS GOOD FOR EVERY LENDER",
        "shares look VERY strong after the upgrade.",
        "the deal was REALLY bad for minority holders.",
        "auditors flagged SERIOUS problems at the unit.",
        "one word summed up the day: PANIC everywhere.",
        "resULTS were mixed but the dividend was SAFE.",
        "the GAINS were broad and the mood was calm.",
    ],
    "degree": [
        "the outlook is very good.",
        "the outlook is extremely good.",
        "the outlook is marginally good.",
        "the quarter was really bad for exporters.",
        "the quarter was slightly bad for exporters.",
        "demand was incredibly weak in december.",
        "the numbers were barely positive this time.",
        "the auction drew remarkably strong interest.",
        "management was utterly confident about the plan.",
        "lenders stayed somewhat cautious on new credit.",
        "the recovery was so very fragile that nobody relaxed.",
        "margins were quite healthy across retail.",
        "the report was hugely disappointing for the street.",
        "volumes were really very strong near the close.",
        "the market kind of panicked after the filing.",
        "the street sort of celebrated the bailout news.",
        "the guidance was almost optimistic about volumes.",
        "rivals were hardly worried about the entrant.",
        "the downturn was particularly brutal for miners.",
        "the response was less enthusiastic than hoped.",
    ],
    "negation": [
        "the stock is not good.",
        "the quarter was not bad at all.",
        "the fund did not win approval for the plan.",
        "the lender is not weak.",
        "management isn't worried about liquidity.",
        "the auditor wasn't satisfied with the books.",
        "the regulator doesn't trust the filings.",
        "creditors won't forgive the missed payment.",
        "the bank cannot afford another scandal.",
        "the rally never lasted beyond lunch.",
        "the desk never doubted the hedge.",
        "suppliers were rarely paid on time.",
        "the plan was seldom praised by analysts.",
        "neither side claimed victory after the ruling.",
        "nothing good came from the restructuring.",
        "the downturn hurt everyone without exception.",
        "the strategy was not quite as good as promised.",
        "the chairman was not at all happy with the leak.",
        "directors didn't celebrate the settlement.",
        "nobody called the quarter an outright failure.",
    ],
    "but": [
        "the revenue was weak but the outlook is excellent.",
        "the stock is good but the debt worries analysts.",
        "margins improved but the lawsuit drags on.",
        "the fund lost money but the managers stay confident.",
        "exports grew but the deficit still worries analysts.",
        "the brand is strong but sales keep falling.",
        "customers complained but the refunds were generous.",
        "the quarter looked solid but guidance was cut sharply.",
        "the bailout helped but the panic returned within weeks.",
        "the ipo was successful but the lockup expiry looms.",
        "staff morale is great but the hiring freeze continues.",
        "the audit found fraud but the shares barely moved.",
    ],
    "combo": [
        "the stock is not very good.",
        "the outlook was never really strong this year.",
        "shares are VERY strong but the valuation is not cheap!",
        "the quarter wasn't terrible, yet the stock slid anyway.",
        "the really weak rupee didn't help importers at all!!",
        "an extremely bad december ruined an otherwise fine year.",
        "the bank is not UNIQUELY weak, rivals struggle too.",
        "profits soared and the board was extremely pleased!!!",
        "the very gloomy forecast sparked fresh selling??",
        "traders were not amused by the surprise rate cut!",
        "the merger wasn't blocked but the terms got worse.",
        "the hardly convincing rebound left the desk uneasy.",
    ],
    "emoticon": [
        "earnings day went well :)",
        "the portfolio is bleeding :(",
        "rough session for the bulls :-(",
        "finally some green on the screen :-)",
    ],
    "edge": [
        "",
        "the",
        "the committee reviewed the schedule and adjourned.",
        "good.",
        "loss.",
        "GOOD",
    ],
}


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__)
        return 2
    bundle = sys.argv[1]
    texts = [t for sentences in CASES.values() for t in sentences]
    oracle_script = Path(__file__).with_name("vader_oracle.js")
    proc = subprocess.run(
        ["node", str(oracle_script), bundle],
        input=json.dumps(texts),
        capture_output=True,
        text=True,
        check=True,
    )
    oracle = json.loads(proc.stdout)

    lexicon = bundled_vader_lexicon()
    cases = []
    disagreements = []
    i = 0
    for bucket, sentences in CASES.items():
        for text in sentences:
            ref = oracle[i]
            i += 1
            mine = score_heuristic(text, lexicon)
            same = (
                abs(mine.compound - ref["compound"]) <= 5e-7
                and abs(mine.pos_prop - ref["pos"]) <= 5e-7
                and abs(mine.neg_prop - ref["neg"]) <= 5e-7
                and abs(mine.neu_prop - ref["neu"]) <= 5e-7
            )
            if not same:
                disagreements.append((bucket, text, ref, mine))
            cases.append(
                {
                    "bucket": bucket,
                    "text": text,
                    "compound": ref["compound"],
                    "pos": ref["pos"],
                    "neg": ref["neg"],
                    "neu": ref["neu"],
                }
            )

    if disagreements:
        print(f"{len(disagreements)} disagreement(s); nothing frozen:\n")
        for bucket, text, ref, mine in disagreements:
            print(f"[{bucket}] {text!r}")
            print(f"  reference: compound={ref['compound']} pos={ref['pos']} "
                  f"neg={ref['neg']} neu={ref['neu']}")
            print(f"  engine:    compound={mine.compound} pos={mine.pos_prop} "
                  f"neg={mine.neg_prop} neu={mine.neu_prop}")
        return 1

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "description": (
            "Frozen reference outputs for the heuristic scorer; generated by "
            "scripts/dev/freeze_parity_suite.py from an independent public "
            "implementation and committed for offline regression testing."
        ),
        "case_count": len(cases),
        "cases": cases,
    }
    OUT_PATH.write_text(json.dumps(payload, indent=1, ensure_ascii=False) + "\n", "utf-8")
    print(f"froze {len(cases)} cases -> {OUT_PATH}")
    buckets = {b: len(s) for b, s in CASES.items()}
    print("bucket sizes:", buckets)
    return 0


if __name__ == "__main__":
    sys.exit(main())
