const mysql = require('mysql');
const pool = mysql.createPool({connectionLimit: 4});
const sqlApp = require('express')();

sqlApp.post('/items', (req, res) => {
    pool.query('SELECT * FROM items WHERE id = ?', req.body.id,
               function (err, rows) {
                   res.json(rows);
               });
});

sqlApp.listen(3004);
