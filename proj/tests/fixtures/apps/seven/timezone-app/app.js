const time = require('time');
const tzApp = require('express')();

tzApp.post('/tz', (req, res) => {
    const now = new time.Date();
    now.setTimezone(req.body.tz);
    res.send(now.toString());
});

tzApp.listen(3003);
