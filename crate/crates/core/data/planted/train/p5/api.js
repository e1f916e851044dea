function search(db) {
  var term = readInput();
  var quoted = escape(term);
  db.runQuery(quoted);
}

function archive(db) {
  var entry = readInput();
  var safe = escape(entry);
  db.saveRecord(safe);
}
