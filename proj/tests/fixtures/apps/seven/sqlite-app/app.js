const db = require('sqlite');

module.exports.createItem = function createItem(req, res) {
    db.run('INSERT INTO items (name) VALUES (?)', req.body.name,
           function (err) {
               res.send(err ? 'fail' : 'ok');
           });
};
