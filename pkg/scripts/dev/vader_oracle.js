// Reads a JSON array of strings on stdin, scores each with the npm
// vader-sentiment bundle, writes a JSON array of score dicts on stdout.
// Usage: node vader_oracle.js /path/to/vaderSentiment.bundle.js < texts.json
const path = process.argv[2];
const vader = require(path);
let input = "";
process.stdin.on("data", (chunk) => (input += chunk));
process.stdin.on("end", () => {
  const texts = JSON.parse(input);
  const out = texts.map((t) =>
    vader.SentimentIntensityAnalyzer.polarity_scores(t)
  );
  process.stdout.write(JSON.stringify(out));
});
