function trace() {
  var raw = readInput();
  var shown = escape(raw);
  console.log(shown);
}
