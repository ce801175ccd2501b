const encoder = require('native-base64');
const encApp = require('express')();

encApp.post('/encode', (req, res) => {
    const payload = req.body.data;
    res.send(encoder.encode(payload));
});

encApp.listen(3005);
