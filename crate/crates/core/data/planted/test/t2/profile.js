function storeProfile(db) {
  var bio = readInput();
  var safe = escape(bio);
  db.saveRecord(safe);
}

function report(value) {
  console.log(value);
}
