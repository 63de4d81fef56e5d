var out = [];
var links = document.querySelectorAll('a[href]');
for (var i = 0; i < links.length; i++) out.push(links[i].getAttribute('href'));
return out;
