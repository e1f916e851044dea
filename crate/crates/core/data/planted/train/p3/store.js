function storeComment3(db) {
  var body = readInput();
  var safe = escape(body);
  db.saveRecord(safe);
}
